// model.hpp — single-mode linear bosonic model: parameters, moment states,
// and the two-exponential transfer coefficients of the drift.
//
// Dynamics: dalpha/dt = -(mu/2) alpha + beta conj(alpha) + eta(t), with white
// noise obeying <eta(t') eta(t)> = -B delta(t-t') and
// <conj(eta(t')) eta(t)> = C delta(t-t').
#pragma once

#include <complex>
#include <string>
#include <vector>

namespace g2kit {

using Complex = std::complex<double>;

// Drift and noise constants. Stable iff mu - 2*beta > 0; the noise covariance
// is positive semidefinite iff C >= |B|.
struct SystemParams {
    double mu = 1.0;    // energy decay rate, > 0
    double beta = 0.0;  // conjugate (parametric) coupling, >= 0
    Complex B{0.0, 0.0};
    double C = 0.0;

    double lambda_minus() const { return mu - 2.0 * beta; }
    double lambda_plus() const { return mu + 2.0 * beta; }
};

// First and second moments of the field: mean = <alpha>, m2 = <alpha^2>,
// n = <conj(alpha) alpha>. Physical (classical-Gaussian) states satisfy
// n >= |mean|^2 and |m2 - mean^2| <= n - |mean|^2.
struct MomentState {
    Complex mean{0.0, 0.0};
    Complex m2{0.0, 0.0};
    double n = 0.0;
};

// a_pm(tau) = (e^{-lambda_minus tau/2} +- e^{-lambda_plus tau/2}) / 2.
// alpha(t+tau) = a_plus alpha(t) + a_minus conj(alpha(t)) + driven response.
struct TransferCoeffs {
    double a_plus = 1.0;
    double a_minus = 0.0;
    double lambda_minus = 0.0;
    double lambda_plus = 0.0;
    double tau = 0.0;
};

// Uniform delay grid: steps + 1 points from 0 to tau_max inclusive.
struct TauGrid {
    double tau_max = 5.0;
    int steps = 100;
};

// Throws DomainError("unstable: ...") if mu - 2*beta <= 0 or mu <= 0 or
// beta < 0; DomainError("noise: ...") if C < |B| or C < 0.
void validate_params(const SystemParams& p);

// Throws ConfigError unless tau_max > 0 and steps > 1.
std::vector<double> grid_points(const TauGrid& grid);

// Throws DomainError if the state violates the moment inequalities beyond
// `slack` (absolute, scaled by max(1, n)).
void validate_moment_state(const MomentState& s, double slack = 1e-9);

// Throws DomainError on negative tau or invalid params.
TransferCoeffs transfer_coeffs(const SystemParams& p, double tau);

// JSON (de)serialization with keys {"mu","beta","B_re","B_im","C"}.
std::string to_json_string(const SystemParams& p);
SystemParams params_from_json_string(const std::string& text);

} // namespace g2kit
