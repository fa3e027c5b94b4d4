// gaussint.cpp — reduction of complex Gaussian forms to real quadrature data.
#include "g2kit/gaussint.hpp"

#include <cmath>
#include <numeric>

#include "g2kit/errors.hpp"

namespace g2kit::gaussint {
namespace {

constexpr double kCondLimit = 1e12;
constexpr double kDetFloor = 1e-300;

void validate_shape(const GaussianForm& form) {
    const auto n = form.A.rows();
    if (n < 1) throw ConfigError("gaussian form: empty");
    if (form.A.cols() != n || form.F.rows() != n || form.F.cols() != n ||
        form.G.rows() != n || form.G.cols() != n || form.b.size() != n ||
        form.c.size() != n)
        throw ConfigError("gaussian form: inconsistent dimensions");
    const double scale_f = std::max(1.0, form.F.cwiseAbs().maxCoeff());
    const double scale_g = std::max(1.0, form.G.cwiseAbs().maxCoeff());
    if ((form.F - form.F.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale_f)
        throw ConfigError("gaussian form: F not symmetric");
    if ((form.G - form.G.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale_g)
        throw ConfigError("gaussian form: G not symmetric");
}

// Everything integrate/moment needs, computed once per form.
struct Reduced {
    Complex norm;   // value of the bare integral
    CVec mean_w;    // mean of w = (z, conj z)
    CMat q_inv_st;  // Q^{-1} S^T, for the covariance M^{-1} = S Q^{-1} S^T
    CMat s;         // complex-to-real change of variables
};

Reduced reduce(const GaussianForm& form) {
    validate_shape(form);
    const int n = form.size();
    const Complex i1(0.0, 1.0);

    // w = (z, conj z) = S (x, y); exponent = -w^T M w / 2 + J^T w.
    CMat m = CMat::Zero(2 * n, 2 * n);
    m.topLeftCorner(n, n) = -2.0 * form.F;
    m.bottomRightCorner(n, n) = -2.0 * form.G;
    m.topRightCorner(n, n) = form.A.transpose();
    m.bottomLeftCorner(n, n) = form.A;

    CMat s = CMat::Zero(2 * n, 2 * n);
    s.topLeftCorner(n, n) = CMat::Identity(n, n);
    s.topRightCorner(n, n) = i1 * CMat::Identity(n, n);
    s.bottomLeftCorner(n, n) = CMat::Identity(n, n);
    s.bottomRightCorner(n, n) = -i1 * CMat::Identity(n, n);

    CVec j(2 * n);
    j.head(n) = form.b;
    j.tail(n) = form.c;

    CMat q = s.transpose() * m * s;
    q = 0.5 * (q + q.transpose()).eval();
    const CVec l = s.transpose() * j;

    // Convergence requires Re(Q) positive definite; a flat direction is a
    // singular form, a negative one a divergent integral.
    const Eigen::MatrixXd re_q = 0.5 * (q.real() + q.real().transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> re_eig(re_q, Eigen::EigenvaluesOnly);
    const double re_max = std::max(1.0, re_eig.eigenvalues().cwiseAbs().maxCoeff());
    const double re_min = re_eig.eigenvalues().minCoeff();
    if (re_min < -1e-12 * re_max)
        throw ConvergenceError("gaussian integral diverges: quadratic form has a growing direction");
    if (re_min <= 1e-12 * re_max)
        throw SingularError("gaussian integral: quadratic form has a flat direction");

    Eigen::JacobiSVD<CMat> svd(q, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(2 * n - 1);
    if (smin <= 0.0 || smax / smin > kCondLimit)
        throw SingularError("gaussian integral: quadratic form numerically singular");

    // det(Q)^{-1/2} by principal square roots of the eigenvalues; with
    // Re(Q) positive definite every eigenvalue lies in the right half
    // plane, so this is the analytic continuation from the real case.
    Eigen::ComplexEigenSolver<CMat> eig(q, false);
    Complex det_inv_sqrt(1.0, 0.0);
    double abs_det = 1.0;
    for (int k = 0; k < 2 * n; ++k) {
        const Complex lam = eig.eigenvalues()(k);
        det_inv_sqrt /= std::sqrt(lam);
        abs_det *= std::abs(lam);
    }
    if (abs_det < kDetFloor)
        throw SingularError("gaussian integral: vanishing determinant");

    Reduced red;
    red.s = std::move(s);
    red.q_inv_st = svd.solve(red.s.transpose());
    const CVec q_inv_l = svd.solve(l);
    red.mean_w = red.s * q_inv_l;
    red.norm = std::pow(2.0, n) * det_inv_sqrt *
               std::exp(0.5 * (l.transpose() * q_inv_l).value());
    return red;
}

// Flatten a monomial into w-indices: variable i contributes index i per
// power of z_i and index n+i per power of conj(z_i).
std::vector<int> factor_list(const Monomial& mono, int n, int degree_limit) {
    if (static_cast<int>(mono.z_pow.size()) != n ||
        static_cast<int>(mono.zbar_pow.size()) != n)
        throw ConfigError("monomial: dimension mismatch with form");
    std::vector<int> factors;
    for (int i = 0; i < n; ++i) {
        if (mono.z_pow[i] < 0 || mono.zbar_pow[i] < 0)
            throw ConfigError("monomial: negative power");
        factors.insert(factors.end(), mono.z_pow[i], i);
        factors.insert(factors.end(), mono.zbar_pow[i], n + i);
    }
    if (static_cast<int>(factors.size()) > degree_limit)
        throw DegreeError("monomial degree " + std::to_string(factors.size()) +
                          " exceeds limit " + std::to_string(degree_limit));
    return factors;
}

Complex wick_over(const std::vector<int>& active, const std::vector<Complex>& means,
                  const CMat& cov) {
    if (active.empty()) return Complex(1.0, 0.0);
    const int f0 = active.front();
    std::vector<int> rest(active.begin() + 1, active.end());
    Complex acc = means[static_cast<size_t>(f0)] * wick_over(rest, means, cov);
    for (size_t j = 0; j < rest.size(); ++j) {
        std::vector<int> sub;
        sub.reserve(rest.size() - 1);
        for (size_t k = 0; k < rest.size(); ++k)
            if (k != j) sub.push_back(rest[k]);
        acc += cov(f0, rest[j]) * wick_over(sub, means, cov);
    }
    return acc;
}

Complex wick_of_factors(const Reduced& red, const std::vector<int>& factors) {
    // Pairings in w-space: cov_w = M^{-1} = S Q^{-1} S^T.
    const CMat cov_w = red.s * red.q_inv_st;
    std::vector<Complex> means(static_cast<size_t>(red.mean_w.size()));
    for (Eigen::Index k = 0; k < red.mean_w.size(); ++k)
        means[static_cast<size_t>(k)] = red.mean_w(k);
    std::vector<int> active(factors.begin(), factors.end());
    return wick_over(active, means, cov_w);
}

} // namespace

GaussianForm::GaussianForm(int n)
    : A(CMat::Identity(n, n)),
      F(CMat::Zero(n, n)),
      G(CMat::Zero(n, n)),
      b(CVec::Zero(n)),
      c(CVec::Zero(n)) {
    if (n < 1) throw ConfigError("gaussian form: size must be positive");
}

int Monomial::degree() const {
    return std::accumulate(z_pow.begin(), z_pow.end(), 0) +
           std::accumulate(zbar_pow.begin(), zbar_pow.end(), 0);
}

Complex integrate(const GaussianForm& form) { return reduce(form).norm; }

Complex moment(const GaussianForm& form, const Monomial& mono, int degree_limit) {
    const Reduced red = reduce(form);
    const auto factors = factor_list(mono, form.size(), degree_limit);
    return red.norm * wick_of_factors(red, factors);
}

Complex expectation(const GaussianForm& form, const Monomial& mono, int degree_limit) {
    const Reduced red = reduce(form);
    const auto factors = factor_list(mono, form.size(), degree_limit);
    return wick_of_factors(red, factors);
}

GaussianForm from_covariance(const CVec& mean_w, const CMat& cov_w) {
    if (cov_w.rows() != cov_w.cols() || cov_w.rows() < 2 || cov_w.rows() % 2 != 0)
        throw ConfigError("from_covariance: covariance must be 2n x 2n");
    if (mean_w.size() != cov_w.rows())
        throw ConfigError("from_covariance: mean length must match covariance");
    const double scale = std::max(1.0, cov_w.cwiseAbs().maxCoeff());
    if ((cov_w - cov_w.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw ConfigError("from_covariance: covariance not symmetric");
    const int n = static_cast<int>(cov_w.rows()) / 2;

    Eigen::PartialPivLU<CMat> lu(cov_w);
    const double rcond = lu.rcond();
    if (!(rcond > 1.0 / kCondLimit))
        throw SingularError("from_covariance: covariance numerically singular");
    CMat m = lu.solve(CMat::Identity(2 * n, 2 * n));
    m = 0.5 * (m + m.transpose()).eval();

    GaussianForm form(n);
    form.F = -0.5 * m.topLeftCorner(n, n);
    form.G = -0.5 * m.bottomRightCorner(n, n);
    form.A = m.bottomLeftCorner(n, n);
    const CVec j = m * mean_w;
    form.b = j.head(n);
    form.c = j.tail(n);
    return form;
}

Complex wick_expectation(const std::vector<Complex>& means, const CMat& cov) {
    const int k = static_cast<int>(means.size());
    if (cov.rows() != k || cov.cols() != k)
        throw ConfigError("wick_expectation: covariance must be k x k for k factors");
    const double scale = k ? std::max(1.0, cov.cwiseAbs().maxCoeff()) : 1.0;
    if (k && (cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw ConfigError("wick_expectation: covariance not symmetric");
    std::vector<int> active(means.size());
    std::iota(active.begin(), active.end(), 0);
    return wick_over(active, means, cov);
}

} // namespace g2kit::gaussint
