// sde.hpp — Monte Carlo route: c-number Langevin trajectories with the
// model's complex noise correlations, and ensemble estimators for the
// one- and two-time moments (raw fourth moment, no factorization assumed).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "g2kit/model.hpp"
#include "g2kit/regression.hpp"
#include "g2kit/rng.hpp"

namespace g2kit::sde {

enum class Scheme { exact_ou, euler_maruyama };

// Accepts "exact-OU" / "exact-ou" / "euler-maruyama"; ConfigError otherwise.
Scheme scheme_from_string(const std::string& name);
std::string to_string(Scheme s);

// One integrated noise kick eta over a step dt.  Ensemble statistics:
// mean 0, E[value^2] = -B dt, E[|value|^2] = C dt.
struct NoiseIncrement {
    Complex value{0.0, 0.0};
    double dt = 0.0;
};

struct EnsembleConfig {
    std::int64_t n_traj = 10000;
    std::uint64_t seed = 0;
    double dt = 0.01;       // integrator step (and relaxation step)
    double t_relax = 0.0;   // 0: sample the steady state directly; > 0: relax from vacuum
    Scheme scheme = Scheme::exact_ou;
};

// ConfigError on non-positive n_traj/dt or negative t_relax; DomainError on
// invalid params or a Euler step larger than 0.1 / lambda_plus.
void validate_ensemble(const SystemParams& p, const EnsembleConfig& cfg);

struct Trajectory {
    std::vector<double> times;
    std::vector<Complex> alpha;
};

// Draw eta = x + iy with Var(x) = (C - Re B) dt / 2, Var(y) = (C + Re B) dt / 2,
// Cov(x, y) = -(Im B) dt / 2 — the unique real-Gaussian pair reproducing the
// complex correlators.  Consumes exactly one normal pair.
NoiseIncrement sample_noise(const SystemParams& p, double dt, Philox& rng);

// Advance alpha by dt.  exact_ou uses the closed-form solution: the
// quadrature components decay at lambda_minus/2 and lambda_plus/2 and the
// integrated-noise Gaussian has its exact covariance over dt, so any dt > 0
// is unbiased.  euler_maruyama does one explicit step (dt <= 0.1/lambda_plus
// enforced).  Consumes exactly one normal pair either way.
Complex step(const SystemParams& p, Complex alpha, double dt, Philox& rng, Scheme scheme);

// One trajectory over `times` (the first entry is the two-time origin).
// Initial state: steady-state Gaussian sample when t_relax = 0, otherwise
// vacuum relaxed for ceil(t_relax/dt) steps.  exact_ou jumps each grid gap
// in one step; euler_maruyama subdivides gaps into steps of at most dt.
// The random stream is keyed by (cfg.seed, traj_index) only.
Trajectory simulate_trajectory(const SystemParams& p, const EnsembleConfig& cfg,
                               const std::vector<double>& times, std::uint64_t traj_index);

// Unnormalized ensemble estimates on the delay grid, with standard errors
// from the ensemble sample variance.  `fourth` is the raw two-time moment
// E[conj(a0) conj(at) at a0]; nothing is factorized.
struct RawEstimates {
    std::vector<double> tau;
    double n_hat = 0.0;
    double n_hat_err = 0.0;
    std::vector<Complex> c_normal;
    std::vector<Complex> c_anom;
    std::vector<double> c_normal_err;
    std::vector<double> c_anom_err;
    std::vector<double> fourth;
    std::vector<double> fourth_err;
};

// Run the ensemble.  n_threads = 0 picks the hardware concurrency; the
// result is bit-identical for every thread count (fixed-size trajectory
// blocks, compensated in-order reduction).
RawEstimates estimate_moments(const SystemParams& p, const EnsembleConfig& cfg,
                              const TauGrid& grid, int n_threads = 0);

// Normalized curve: g1 = c_normal / n_hat, g2 = fourth / n_hat^2, errors
// scaled the same way, n_ss = n_hat.  DomainError("zero denominator") when
// the occupation estimate vanishes.
regression::CorrelationCurve simulate_curve(const SystemParams& p, const EnsembleConfig& cfg,
                                            const TauGrid& grid, int n_threads = 0);

} // namespace g2kit::sde
