// qfunction.hpp — quasi-distribution route: Gaussian phase-space density,
// anti-normally ordered moments by Gaussian integration, conversion to
// normal order, and two-time correlations via a joint two-time density.
#pragma once

#include <functional>

#include "g2kit/model.hpp"
#include "g2kit/regression.hpp"

namespace g2kit::qfunction {

// Gaussian phase-space density of one mode. sigma_n = <|d alpha|^2> carries
// the anti-normal vacuum unit, so sigma_n >= 1; sigma_m = <(d alpha)^2>.
struct GaussianQ {
    Complex mean{0.0, 0.0};
    double sigma_n = 1.0;
    Complex sigma_m{0.0, 0.0};
};

// Joint Gaussian density over the field at two times separated by a delay.
// Same-time blocks carry the vacuum unit (sigma_n); cross blocks carry the
// plain two-time covariances, with no added unit.
struct JointGaussianQ {
    Complex mean_a{0.0, 0.0};
    Complex mean_b{0.0, 0.0};
    double sigma_n_a = 1.0;
    double sigma_n_b = 1.0;
    Complex sigma_m_a{0.0, 0.0};
    Complex sigma_m_b{0.0, 0.0};
    Complex cross_normal{0.0, 0.0}; // <conj(d alpha_a) d alpha_b>
    Complex cross_anom{0.0, 0.0};   // <d alpha_a d alpha_b>
};

// Throws DomainError if sigma_n < 1 or the 2x2 covariance is not PSD.
void validate_q(const GaussianQ& q);

// Throws DomainError unless the full two-time real covariance is PSD and
// both marginals are valid.
void validate_joint_q(const JointGaussianQ& j);

// mean = <alpha>, sigma_n = (n - |mean|^2) + 1, sigma_m = m2 - mean^2.
GaussianQ q_from_moments(const MomentState& s);

// Density value at a point; non-negative, integrates to 1 over d^2 alpha.
double q_evaluate(const GaussianQ& q, Complex alpha);

// Anti-normally ordered moment <a^m a_dag^l> = E_Q[alpha^m conj(alpha)^l],
// evaluated through the Gaussian integral engine. Throws DegreeError when
// l + m exceeds the engine's monomial limit.
Complex antinormal_moment(const GaussianQ& q, int l, int m);

// Normally ordered <a_dag^l a^m> from a table of anti-normal moments
// (l', m') with l' <= l, m' <= m, by recursive commutator reordering:
//   N(l, m) = A(l, m) - sum_{k>=1} k! C(l,k) C(m,k) N(l-k, m-k).
// Throws DegreeError when l or m exceeds `limit`.
Complex to_normal_order(int l, int m,
                        const std::function<Complex(int, int)>& antinormal,
                        int limit = 4);

// Convenience: normally ordered moment of a Gaussian density.
Complex normal_moment(const GaussianQ& q, int l, int m);

// Stationary two-time joint density: marginals from the steady state at
// both times, cross blocks from the stationary two-time pair.
JointGaussianQ joint_q(const SystemParams& p, double tau);

// g2 over the grid through the quasi-distribution route: the anti-normal
// two-time fourth moment from the joint density, ordering corrections down
// to normal order, normalized by the route's own occupation estimate.
// Agrees with the direct analytic route identically.
regression::CorrelationCurve g2_via_q(const SystemParams& p, const TauGrid& grid);

// Equal-time g2 of an arbitrary valid state via the ordering route:
// <a_dag^2 a^2> / <a_dag a>^2. Deterministic coherent states give exactly 1.
double g2_zero_from_state(const MomentState& s);

} // namespace g2kit::qfunction
