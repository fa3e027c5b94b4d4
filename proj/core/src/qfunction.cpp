// qfunction.cpp — Gaussian phase-space densities and ordering conversions.
#include "g2kit/qfunction.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "g2kit/errors.hpp"
#include "g2kit/gaussint.hpp"

namespace g2kit::qfunction {
namespace {

constexpr double kPsdSlack = 1e-9;

// Real 2x2 covariance block over (x, y) for a pair of complex variables
// with <d z_a d z_b> = anom and <conj(d z_a) d z_b> = normal.
Eigen::Matrix2d real_block(Complex anom, Complex normal) {
    Eigen::Matrix2d blk;
    blk(0, 0) = 0.5 * (anom + normal).real();
    blk(0, 1) = 0.5 * (anom.imag() + normal.imag());
    blk(1, 0) = 0.5 * (anom.imag() - normal.imag());
    blk(1, 1) = 0.5 * (normal - anom).real();
    return blk;
}

// w-ordering (z_a, z_b, conj z_a, conj z_b) covariance of a joint density.
gaussint::CMat joint_cov_w(const JointGaussianQ& j) {
    gaussint::CMat cov(4, 4);
    cov(0, 0) = j.sigma_m_a;
    cov(0, 1) = j.cross_anom;
    cov(0, 2) = j.sigma_n_a;
    cov(0, 3) = std::conj(j.cross_normal);
    cov(1, 1) = j.sigma_m_b;
    cov(1, 2) = j.cross_normal;
    cov(1, 3) = j.sigma_n_b;
    cov(2, 2) = std::conj(j.sigma_m_a);
    cov(2, 3) = std::conj(j.cross_anom);
    cov(3, 3) = std::conj(j.sigma_m_b);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < r; ++c) cov(r, c) = cov(c, r);
    return cov;
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
    return b;
}

} // namespace

void validate_q(const GaussianQ& q) {
    const double scale = std::max(1.0, q.sigma_n);
    if (q.sigma_n < 1.0 - kPsdSlack * scale)
        throw DomainError("q density: sigma_n below the vacuum floor 1");
    if (std::abs(q.sigma_m) > q.sigma_n + kPsdSlack * scale)
        throw DomainError("q density: covariance not positive semidefinite (|sigma_m| > sigma_n)");
}

void validate_joint_q(const JointGaussianQ& j) {
    validate_q(GaussianQ{j.mean_a, j.sigma_n_a, j.sigma_m_a});
    validate_q(GaussianQ{j.mean_b, j.sigma_n_b, j.sigma_m_b});
    Eigen::Matrix4d sigma;
    sigma.topLeftCorner(2, 2) = real_block(j.sigma_m_a, Complex(j.sigma_n_a, 0.0));
    sigma.bottomRightCorner(2, 2) = real_block(j.sigma_m_b, Complex(j.sigma_n_b, 0.0));
    const Eigen::Matrix2d cross = real_block(j.cross_anom, j.cross_normal);
    sigma.topRightCorner(2, 2) = cross;
    sigma.bottomLeftCorner(2, 2) = cross.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(sigma, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, sigma.diagonal().maxCoeff());
    if (eig.eigenvalues().minCoeff() < -kPsdSlack * scale)
        throw DomainError("joint q density: two-time covariance not positive semidefinite");
}

GaussianQ q_from_moments(const MomentState& s) {
    validate_moment_state(s);
    GaussianQ q;
    q.mean = s.mean;
    q.sigma_n = (s.n - std::norm(s.mean)) + 1.0;
    q.sigma_m = s.m2 - s.mean * s.mean;
    validate_q(q);
    return q;
}

double q_evaluate(const GaussianQ& q, Complex alpha) {
    validate_q(q);
    const double var_x = 0.5 * (q.sigma_n + q.sigma_m.real());
    const double var_y = 0.5 * (q.sigma_n - q.sigma_m.real());
    const double cxy = 0.5 * q.sigma_m.imag();
    const double det = var_x * var_y - cxy * cxy;
    // det = (sigma_n^2 - |sigma_m|^2)/4 >= (2 sigma_n - 1)/4 >= 1/4 for any
    // density built from a physical state, so no singular branch is needed.
    const double dx = alpha.real() - q.mean.real();
    const double dy = alpha.imag() - q.mean.imag();
    const double quad = (var_y * dx * dx - 2.0 * cxy * dx * dy + var_x * dy * dy) / det;
    return std::exp(-0.5 * quad) / (2.0 * std::numbers::pi * std::sqrt(det));
}

Complex antinormal_moment(const GaussianQ& q, int l, int m) {
    validate_q(q);
    if (l < 0 || m < 0) throw ConfigError("moment orders must be non-negative");
    gaussint::CVec mean_w(2);
    mean_w << q.mean, std::conj(q.mean);
    gaussint::CMat cov_w(2, 2);
    cov_w << q.sigma_m, Complex(q.sigma_n, 0.0), Complex(q.sigma_n, 0.0),
        std::conj(q.sigma_m);
    const gaussint::GaussianForm form = gaussint::from_covariance(mean_w, cov_w);
    gaussint::Monomial mono(1);
    mono.z_pow[0] = m;
    mono.zbar_pow[0] = l;
    return gaussint::expectation(form, mono);
}

Complex to_normal_order(int l, int m,
                        const std::function<Complex(int, int)>& antinormal,
                        int limit) {
    if (l < 0 || m < 0) throw ConfigError("moment orders must be non-negative");
    if (l > limit || m > limit)
        throw DegreeError("ordering conversion limited to order " + std::to_string(limit));
    // N(i,j) = A(i,j) - sum_k k! C(i,k) C(j,k) N(i-k, j-k), filled upward.
    std::vector<std::vector<Complex>> table(static_cast<size_t>(l) + 1,
                                            std::vector<Complex>(static_cast<size_t>(m) + 1));
    for (int i = 0; i <= l; ++i) {
        for (int j = 0; j <= m; ++j) {
            Complex acc = antinormal(i, j);
            const int kmax = std::min(i, j);
            for (int k = 1; k <= kmax; ++k)
                acc -= factorial(k) * binomial(i, k) * binomial(j, k) *
                       table[static_cast<size_t>(i - k)][static_cast<size_t>(j - k)];
            table[static_cast<size_t>(i)][static_cast<size_t>(j)] = acc;
        }
    }
    return table[static_cast<size_t>(l)][static_cast<size_t>(m)];
}

Complex normal_moment(const GaussianQ& q, int l, int m) {
    return to_normal_order(l, m,
                           [&q](int a, int b) { return antinormal_moment(q, a, b); });
}

JointGaussianQ joint_q(const SystemParams& p, double tau) {
    const MomentState ss = regression::steady_state(p);
    const regression::TwoTimePair pair = regression::two_time_pair(p, tau);
    JointGaussianQ j;
    j.sigma_n_a = ss.n + 1.0;
    j.sigma_n_b = ss.n + 1.0;
    j.sigma_m_a = ss.m2;
    j.sigma_m_b = ss.m2;
    j.cross_normal = pair.c_normal;
    j.cross_anom = pair.c_anom;
    validate_joint_q(j);
    return j;
}

regression::CorrelationCurve g2_via_q(const SystemParams& p, const TauGrid& grid) {
    const auto pts = grid_points(grid);
    const GaussianQ q = q_from_moments(regression::steady_state(p));
    const Complex n_q_c = normal_moment(q, 1, 1);
    const double n_q = n_q_c.real();
    if (!(n_q > 0.0))
        throw DomainError("zero denominator: occupation from the density route vanishes");

    regression::CorrelationCurve curve;
    curve.n_ss = n_q;
    curve.tau = pts;
    curve.g1.reserve(pts.size());
    curve.g2.reserve(pts.size());

    gaussint::Monomial fourth_mono(2);
    fourth_mono.z_pow = {1, 1};
    fourth_mono.zbar_pow = {1, 1};
    gaussint::Monomial cross_mono(2);
    cross_mono.z_pow = {0, 1};
    cross_mono.zbar_pow = {1, 0};

    for (double tau : pts) {
        const JointGaussianQ j = joint_q(p, tau);
        const gaussint::GaussianForm form =
            gaussint::from_covariance(gaussint::CVec::Zero(4), joint_cov_w(j));

        // Anti-normal two-time fourth moment straight from the density.
        const Complex anti4 = gaussint::expectation(form, fourth_mono);

        // Ordering correction: the same Wick sum with and without the
        // same-time vacuum units; their difference is what anti-normal
        // ordering adds on top of the normally ordered value.
        const std::vector<Complex> means(4, Complex(0.0, 0.0));
        gaussint::CMat qcov(4, 4);
        qcov(0, 0) = std::conj(j.sigma_m_a);
        qcov(0, 1) = std::conj(j.cross_anom);
        qcov(0, 2) = j.cross_normal;
        qcov(0, 3) = Complex(j.sigma_n_a, 0.0);
        qcov(1, 1) = std::conj(j.sigma_m_b);
        qcov(1, 2) = Complex(j.sigma_n_b, 0.0);
        qcov(1, 3) = std::conj(j.cross_normal);
        qcov(2, 2) = j.sigma_m_b;
        qcov(2, 3) = j.cross_anom;
        qcov(3, 3) = j.sigma_m_a;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < r; ++c) qcov(r, c) = qcov(c, r);
        gaussint::CMat ncov = qcov;
        ncov(0, 3) = Complex(j.sigma_n_a - 1.0, 0.0);
        ncov(3, 0) = ncov(0, 3);
        ncov(1, 2) = Complex(j.sigma_n_b - 1.0, 0.0);
        ncov(2, 1) = ncov(1, 2);
        const Complex correction = gaussint::wick_expectation(means, qcov) -
                                   gaussint::wick_expectation(means, ncov);

        const Complex normal4 = anti4 - correction;
        curve.g2.push_back(normal4.real() / (n_q * n_q));
        curve.g1.push_back(gaussint::expectation(form, cross_mono) / n_q);
    }
    regression::validate_curve(curve);
    return curve;
}

double g2_zero_from_state(const MomentState& s) {
    const GaussianQ q = q_from_moments(s);
    const double n_q = normal_moment(q, 1, 1).real();
    if (!(n_q > 0.0))
        throw DomainError("zero denominator: state has no occupation");
    return normal_moment(q, 2, 2).real() / (n_q * n_q);
}

} // namespace g2kit::qfunction
