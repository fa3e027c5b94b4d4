// regression.hpp — analytic route: closed-form moment flow, steady state,
// and stationary two-time correlations with Gaussian factorization.
#pragma once

#include <string>
#include <vector>

#include "g2kit/model.hpp"

namespace g2kit::regression {

// A correlation curve over a delay grid. g1_err/g2_err stay empty for
// analytic routes and carry standard errors for Monte Carlo estimates.
// n_ss records the normalization <conj(alpha) alpha> the curve used.
struct CorrelationCurve {
    std::vector<double> tau;
    std::vector<Complex> g1;
    std::vector<double> g2;
    std::vector<double> g1_err;
    std::vector<double> g2_err;
    double n_ss = 0.0;

    bool has_errors() const { return !g1_err.empty() || !g2_err.empty(); }
};

// Throws ConfigError unless: tau strictly increasing from 0; g1 matches tau;
// g2 empty or matching; g2 >= 0; errors empty or matching and >= 0.
void validate_curve(const CorrelationCurve& curve);

enum class Correlation { bunched, antibunched, flat };
enum class Statistics { poissonian, super_poissonian, sub_poissonian };

struct Classification {
    Correlation correlation = Correlation::flat;
    Statistics statistics = Statistics::poissonian;
};

std::string to_string(Correlation c);
std::string to_string(Statistics s);
// Canonical report label, e.g. "bunched, super-Poissonian".
std::string to_string(const Classification& c);

// Propagate (mean, m2, n) for a time t >= 0 in closed form: the mean through
// the two-exponential transfer map, the second moments through the decoupled
// (lambda_minus, lambda_plus, mu) relaxation channels toward steady state.
MomentState evolve_moments(const SystemParams& p, const MomentState& s0, double t);

// Unique fixed point of evolve_moments for stable params: mean = 0,
// n = (mu C - 2 beta Re B) / (mu^2 - 4 beta^2), m2 = (2 beta n - B) / mu.
MomentState steady_state(const SystemParams& p);

struct TwoTimePair {
    Complex c_normal; // <conj(alpha(t)) alpha(t+tau)> at steady state
    Complex c_anom;   // <alpha(t) alpha(t+tau)> at steady state
};

// Stationary two-time pair via the transfer coefficients; future noise is
// uncorrelated with the field at the earlier time, so no driven term enters.
TwoTimePair two_time_pair(const SystemParams& p, double tau);

// g1(tau) = c_normal(tau) / n_ss. Throws DomainError("zero denominator")
// when n_ss = 0 (the C = 0 case). Fills tau, g1, n_ss only.
CorrelationCurve g1_curve(const SystemParams& p, const TauGrid& grid);

// g2(tau) = 1 + (|c_normal|^2 + |c_anom|^2) / n_ss^2 by Gaussian (Isserlis)
// factorization of the fourth moment. Fills tau, g1, g2, n_ss.
CorrelationCurve g2_curve(const SystemParams& p, const TauGrid& grid);

// Equal-time g2 of a number state with occupation n: 1 - 1/n. Distinct from
// the Gaussian-state result; kept as its own operation. Throws on n <= 0.
double g2_zero_number_formula(double n);

// Tail-vs-zero-delay correlation class and zero-delay statistics class.
Classification classify(const CorrelationCurve& curve, double tol);

// Transient two-time g2 from an arbitrary initial state: full Gaussian
// moment expansion with means over the joint law of (alpha(t), alpha(t+tau)),
// normalized by n(t) n(t+tau). Deterministic (noise-free) coherent input
// gives exactly 1 for all delays.
double g2_transient(const SystemParams& p, const MomentState& s0, double t, double tau);

} // namespace g2kit::regression
