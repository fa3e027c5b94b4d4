// sde.cpp — Langevin trajectories and deterministic threaded ensemble
// reduction (fixed trajectory blocks, compensated in-order sums).
#include "g2kit/sde.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "g2kit/errors.hpp"

namespace g2kit::sde {

namespace {

constexpr std::int64_t kBlock = 4096; // trajectories per reduction block

// Compensated accumulator; per-block sums are combined in block order so
// totals do not depend on the thread count.
struct Kahan {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

// Correlated pair with Var(x) = vx, Var(y) = vy, Cov(x, y) = cxy from one
// standard-normal pair.  The matrices passed in are positive semidefinite
// up to roundoff; negative square-root arguments are clamped.
struct GaussPair {
    double x = 0.0;
    double y = 0.0;
};

GaussPair correlated_pair(double vx, double vy, double cxy, Philox& rng) {
    const auto [g1, g2] = rng.normal_pair();
    GaussPair out;
    if (vx > 0.0) {
        const double sx = std::sqrt(vx);
        const double slope = cxy / sx;
        const double resid = std::sqrt(std::max(0.0, vy - slope * slope));
        out.x = sx * g1;
        out.y = slope * g1 + resid * g2;
    } else {
        out.x = 0.0;
        out.y = std::sqrt(std::max(0.0, vy)) * g2;
    }
    return out;
}

// Exact covariance of the integrated noise over dt in the quadrature basis:
// x rides the lambda_minus channel, y the lambda_plus channel, and the
// cross term integrates the mean rate mu.
void ou_noise_covariance(const SystemParams& p, double dt,
                         double& vx, double& vy, double& cxy) {
    const double lm = p.lambda_minus();
    const double lp = p.lambda_plus();
    vx = (p.C - p.B.real()) * (1.0 - std::exp(-lm * dt)) / (2.0 * lm);
    vy = (p.C + p.B.real()) * (1.0 - std::exp(-lp * dt)) / (2.0 * lp);
    cxy = -p.B.imag() * (1.0 - std::exp(-p.mu * dt)) / (2.0 * p.mu);
}

Complex exact_ou_step(const SystemParams& p, Complex alpha, double dt, Philox& rng) {
    double vx, vy, cxy;
    ou_noise_covariance(p, dt, vx, vy, cxy);
    const GaussPair g = correlated_pair(vx, vy, cxy, rng);
    const double x = std::exp(-0.5 * p.lambda_minus() * dt) * alpha.real() + g.x;
    const double y = std::exp(-0.5 * p.lambda_plus() * dt) * alpha.imag() + g.y;
    return {x, y};
}

void check_euler_dt(const SystemParams& p, double dt) {
    if (dt > 0.1 / p.lambda_plus())
        throw DomainError("step size too large for the explicit scheme: dt must be <= 0.1 / lambda_plus");
}

// Steady-state Gaussian sample: Var(x) = (n + Re m2)/2, Var(y) = (n - Re m2)/2,
// Cov(x, y) = Im(m2)/2.
Complex sample_steady(const SystemParams& p, Philox& rng) {
    const MomentState ss = regression::steady_state(p);
    const double vx = 0.5 * (ss.n + ss.m2.real());
    const double vy = 0.5 * (ss.n - ss.m2.real());
    const double cxy = 0.5 * ss.m2.imag();
    const GaussPair g = correlated_pair(vx, vy, cxy, rng);
    return {g.x, g.y};
}

// Writes alpha at each grid time into `out` (resized).  Shared by the
// public trajectory API and the ensemble workers.
void run_trajectory(const SystemParams& p, const EnsembleConfig& cfg,
                    const std::vector<double>& times, std::uint64_t traj_index,
                    std::vector<Complex>& out) {
    Philox rng(cfg.seed, traj_index);
    Complex alpha;
    if (cfg.t_relax > 0.0) {
        alpha = Complex(0.0, 0.0);
        const auto n_relax = static_cast<std::int64_t>(std::ceil(cfg.t_relax / cfg.dt));
        for (std::int64_t i = 0; i < n_relax; ++i)
            alpha = step(p, alpha, cfg.dt, rng, cfg.scheme);
    } else {
        alpha = sample_steady(p, rng);
    }
    out.resize(times.size());
    out[0] = alpha;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double gap = times[i] - times[i - 1];
        if (cfg.scheme == Scheme::exact_ou) {
            alpha = exact_ou_step(p, alpha, gap, rng);
        } else {
            const auto m = static_cast<std::int64_t>(std::ceil(gap / cfg.dt));
            const double h = gap / static_cast<double>(m);
            for (std::int64_t k = 0; k < m; ++k)
                alpha = step(p, alpha, h, rng, cfg.scheme);
        }
        out[i] = alpha;
    }
}

} // namespace

Scheme scheme_from_string(const std::string& name) {
    if (name == "exact-OU" || name == "exact-ou") return Scheme::exact_ou;
    if (name == "euler-maruyama") return Scheme::euler_maruyama;
    throw ConfigError("unknown scheme \"" + name + "\": expected exact-OU or euler-maruyama");
}

std::string to_string(Scheme s) {
    return s == Scheme::exact_ou ? "exact-OU" : "euler-maruyama";
}

void validate_ensemble(const SystemParams& p, const EnsembleConfig& cfg) {
    validate_params(p);
    if (cfg.n_traj <= 0) throw ConfigError("ensemble: n_traj must be positive");
    if (!(cfg.dt > 0.0)) throw ConfigError("ensemble: dt must be positive");
    if (cfg.t_relax < 0.0) throw ConfigError("ensemble: t_relax must be nonnegative");
    if (cfg.scheme == Scheme::euler_maruyama) check_euler_dt(p, cfg.dt);
}

NoiseIncrement sample_noise(const SystemParams& p, double dt, Philox& rng) {
    validate_params(p);
    if (!(dt > 0.0)) throw DomainError("noise increment: dt must be positive");
    const double vx = 0.5 * (p.C - p.B.real()) * dt;
    const double vy = 0.5 * (p.C + p.B.real()) * dt;
    const double cxy = -0.5 * p.B.imag() * dt;
    const GaussPair g = correlated_pair(vx, vy, cxy, rng);
    return {Complex(g.x, g.y), dt};
}

Complex step(const SystemParams& p, Complex alpha, double dt, Philox& rng, Scheme scheme) {
    validate_params(p);
    if (!(dt > 0.0)) throw DomainError("step: dt must be positive");
    if (scheme == Scheme::exact_ou) return exact_ou_step(p, alpha, dt, rng);
    if (scheme == Scheme::euler_maruyama) {
        check_euler_dt(p, dt);
        const Complex drift = -0.5 * p.mu * alpha + p.beta * std::conj(alpha);
        const NoiseIncrement eta = sample_noise(p, dt, rng);
        return alpha + drift * dt + eta.value;
    }
    throw DomainError("step: unknown scheme");
}

Trajectory simulate_trajectory(const SystemParams& p, const EnsembleConfig& cfg,
                               const std::vector<double>& times, std::uint64_t traj_index) {
    validate_ensemble(p, cfg);
    if (times.empty()) throw ConfigError("trajectory: empty time grid");
    Trajectory tr;
    tr.times = times;
    run_trajectory(p, cfg, times, traj_index, tr.alpha);
    return tr;
}

RawEstimates estimate_moments(const SystemParams& p, const EnsembleConfig& cfg,
                              const TauGrid& grid, int n_threads) {
    validate_ensemble(p, cfg);
    const std::vector<double> taus = grid_points(grid);
    const std::size_t npts = taus.size();

    // Per-block partial sums, laid out as flat doubles:
    //   [0] sum |a0|^2, [1] sum |a0|^4,
    //   then per tau point: Re/Im of conj(a0) at, Re/Im of a0 at,
    //   |a0|^2 |at|^2 and its square.
    const std::size_t width = 2 + 6 * npts;
    const auto n_blocks =
        static_cast<std::size_t>((cfg.n_traj + kBlock - 1) / kBlock);
    std::vector<std::vector<double>> block_sums(n_blocks);

    int workers = n_threads > 0 ? n_threads
                                : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    if (static_cast<std::size_t>(workers) > n_blocks) workers = static_cast<int>(n_blocks);

    std::atomic<std::size_t> next_block{0};
    std::exception_ptr failure;
    std::mutex failure_guard;

    auto worker = [&]() {
        std::vector<Complex> alpha;
        std::vector<Kahan> acc(width);
        try {
            for (;;) {
                const std::size_t b = next_block.fetch_add(1);
                if (b >= n_blocks) break;
                const std::int64_t lo = static_cast<std::int64_t>(b) * kBlock;
                const std::int64_t hi = std::min(cfg.n_traj, lo + kBlock);
                for (auto& a : acc) a = Kahan{};
                for (std::int64_t j = lo; j < hi; ++j) {
                    run_trajectory(p, cfg, taus, static_cast<std::uint64_t>(j), alpha);
                    const Complex a0 = alpha[0];
                    const double n0 = std::norm(a0);
                    acc[0].add(n0);
                    acc[1].add(n0 * n0);
                    for (std::size_t i = 0; i < npts; ++i) {
                        const Complex at = alpha[i];
                        const Complex cn = std::conj(a0) * at;
                        const Complex ca = a0 * at;
                        const double f = n0 * std::norm(at);
                        const std::size_t base = 2 + 6 * i;
                        acc[base + 0].add(cn.real());
                        acc[base + 1].add(cn.imag());
                        acc[base + 2].add(ca.real());
                        acc[base + 3].add(ca.imag());
                        acc[base + 4].add(f);
                        acc[base + 5].add(f * f);
                    }
                }
                auto& sums = block_sums[b];
                sums.resize(width);
                for (std::size_t k = 0; k < width; ++k) sums[k] = acc[k].sum;
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_guard);
            if (!failure) failure = std::current_exception();
            next_block.store(n_blocks); // stop the other workers
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<Kahan> total(width);
    for (std::size_t b = 0; b < n_blocks; ++b)
        for (std::size_t k = 0; k < width; ++k) total[k].add(block_sums[b][k]);

    const auto N = static_cast<double>(cfg.n_traj);
    const double denom = cfg.n_traj > 1 ? N - 1.0 : 1.0;
    auto stderr_of = [&](double mean_sq, double sq_mean) {
        return std::sqrt(std::max(0.0, sq_mean - mean_sq) / denom);
    };

    RawEstimates est;
    est.tau = taus;
    est.n_hat = total[0].sum / N;
    est.n_hat_err = stderr_of(est.n_hat * est.n_hat, total[1].sum / N);
    est.c_normal.resize(npts);
    est.c_anom.resize(npts);
    est.c_normal_err.resize(npts);
    est.c_anom_err.resize(npts);
    est.fourth.resize(npts);
    est.fourth_err.resize(npts);
    for (std::size_t i = 0; i < npts; ++i) {
        const std::size_t base = 2 + 6 * i;
        const Complex cn(total[base + 0].sum / N, total[base + 1].sum / N);
        const Complex ca(total[base + 2].sum / N, total[base + 3].sum / N);
        const double f = total[base + 4].sum / N;
        const double f2 = total[base + 5].sum / N;
        est.c_normal[i] = cn;
        est.c_anom[i] = ca;
        // |conj(a0) at|^2 and |a0 at|^2 are both |a0|^2 |at|^2, so the raw
        // fourth moment doubles as the second moment of either estimator.
        est.c_normal_err[i] = stderr_of(std::norm(cn), f);
        est.c_anom_err[i] = stderr_of(std::norm(ca), f);
        est.fourth[i] = f;
        est.fourth_err[i] = stderr_of(f * f, f2);
    }
    return est;
}

regression::CorrelationCurve simulate_curve(const SystemParams& p, const EnsembleConfig& cfg,
                                            const TauGrid& grid, int n_threads) {
    const RawEstimates est = estimate_moments(p, cfg, grid, n_threads);
    if (!(est.n_hat > 0.0))
        throw DomainError("zero denominator: ensemble occupation estimate vanishes");
    const double n = est.n_hat;
    regression::CorrelationCurve curve;
    curve.tau = est.tau;
    curve.n_ss = n;
    const std::size_t npts = est.tau.size();
    curve.g1.resize(npts);
    curve.g2.resize(npts);
    curve.g1_err.resize(npts);
    curve.g2_err.resize(npts);
    for (std::size_t i = 0; i < npts; ++i) {
        curve.g1[i] = est.c_normal[i] / n;
        curve.g2[i] = est.fourth[i] / (n * n);
        curve.g1_err[i] = est.c_normal_err[i] / n;
        curve.g2_err[i] = est.fourth_err[i] / (n * n);
    }
    regression::validate_curve(curve);
    return curve;
}

} // namespace g2kit::sde
