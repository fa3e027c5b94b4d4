// bench_main.cpp — throughput of the main correlation routes and their
// numerical kernels at representative problem sizes.
#include <benchmark/benchmark.h>

#include <complex>

#include "g2kit/gaussint.hpp"
#include "g2kit/model.hpp"
#include "g2kit/propagator.hpp"
#include "g2kit/qfunction.hpp"
#include "g2kit/regression.hpp"
#include "g2kit/sde.hpp"

using g2kit::Complex;
using g2kit::SystemParams;
using g2kit::TauGrid;

namespace {

SystemParams standard_params() { return SystemParams{1.0, 0.2, Complex{0.0, 0.0}, 0.5}; }

void BM_regression_g2_curve(benchmark::State& state) {
    const SystemParams p = standard_params();
    const TauGrid grid{5.0, static_cast<int>(state.range(0))};
    for (auto _ : state) {
        benchmark::DoNotOptimize(g2kit::regression::g2_curve(p, grid));
    }
    state.SetItemsProcessed(state.iterations() * (state.range(0) + 1));
}

void BM_qfunction_g2_curve(benchmark::State& state) {
    const SystemParams p = standard_params();
    const TauGrid grid{5.0, static_cast<int>(state.range(0))};
    for (auto _ : state) {
        benchmark::DoNotOptimize(g2kit::qfunction::g2_via_q(p, grid));
    }
    state.SetItemsProcessed(state.iterations() * (state.range(0) + 1));
}

void BM_gaussint_expectation(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    g2kit::gaussint::GaussianForm form(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j) form.A(i, j) = Complex{0.02, 0.01 * (i - j)};
        }
        form.b(i) = Complex{0.1, -0.05};
        form.c(i) = Complex{0.05, 0.1};
        if (i + 1 < n) {
            form.F(i, i + 1) = form.F(i + 1, i) = Complex{0.03, 0.0};
            form.G(i, i + 1) = form.G(i + 1, i) = Complex{0.02, 0.01};
        }
    }
    g2kit::gaussint::Monomial mono(n);
    mono.z_pow[0] = 1;
    mono.z_pow[n - 1] = 1;
    mono.zbar_pow[0] = 1;
    mono.zbar_pow[n - 1] = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(g2kit::gaussint::expectation(form, mono));
    }
}

void BM_propagator_chain(benchmark::State& state) {
    const auto family = g2kit::propagator::damped_family(standard_params());
    const Complex alpha0{0.8, -0.3};
    for (auto _ : state) {
        benchmark::DoNotOptimize(g2kit::propagator::g1_via_chain(family, alpha0, 0.4, 0.6));
    }
}

void BM_sde_simulate_curve(benchmark::State& state) {
    const SystemParams p = standard_params();
    g2kit::sde::EnsembleConfig cfg;
    cfg.n_traj = state.range(0);
    cfg.seed = 42;
    cfg.dt = 0.01;
    cfg.scheme = g2kit::sde::Scheme::exact_ou;
    const TauGrid grid{5.0, 10};
    for (auto _ : state) {
        benchmark::DoNotOptimize(g2kit::sde::simulate_curve(p, cfg, grid));
    }
    state.SetItemsProcessed(state.iterations() * cfg.n_traj);
}

void BM_noise_sampling(benchmark::State& state) {
    const SystemParams p{1.0, 0.2, Complex{0.1, 0.05}, 0.5};
    g2kit::Philox rng(7, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(g2kit::sde::sample_noise(p, 0.01, rng));
    }
    state.SetItemsProcessed(state.iterations());
}

} // namespace

BENCHMARK(BM_regression_g2_curve)->Arg(100)->Arg(1000);
BENCHMARK(BM_qfunction_g2_curve)->Arg(100);
BENCHMARK(BM_gaussint_expectation)->Arg(2)->Arg(5)->Arg(10);
BENCHMARK(BM_propagator_chain);
BENCHMARK(BM_sde_simulate_curve)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_noise_sampling);

BENCHMARK_MAIN();
