// gaussint.hpp — complex Gaussian integrals and moments in n variables.
//
// A GaussianForm is the exponent
//     -conj(z)^T A z + b^T z + c^T conj(z) + z^T F z + conj(z)^T G conj(z)
// integrated against prod_i d^2 z_i / pi^n over the whole complex plane.
// F and G must be symmetric.  The default form (A = I) integrates to 1.
//
// Moments are monomials in the z_i and conj(z_i), evaluated by Wick
// pairing with means; `expectation` is the moment of the normalized
// measure, `moment` the unnormalized integral.
#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace g2kit::gaussint {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

struct GaussianForm {
    CMat A; // n x n, coupling conj(z)-z
    CMat F; // n x n symmetric, coupling z-z
    CMat G; // n x n symmetric, coupling conj(z)-conj(z)
    CVec b; // linear in z
    CVec c; // linear in conj(z)

    explicit GaussianForm(int n);
    int size() const { return static_cast<int>(A.rows()); }
};

struct Monomial {
    std::vector<int> z_pow;    // power of z_i
    std::vector<int> zbar_pow; // power of conj(z_i)

    explicit Monomial(int n) : z_pow(n, 0), zbar_pow(n, 0) {}
    int degree() const;
};

// Value of the integral.  Throws ConvergenceError if the real quadratic
// form has a growing direction, SingularError if it is flat or numerically
// singular (condition number beyond 1e12).
Complex integrate(const GaussianForm& form);

// Integral of mono(z, conj z) against the same weight (unnormalized).
// Throws DegreeError when mono.degree() exceeds degree_limit.
Complex moment(const GaussianForm& form, const Monomial& mono, int degree_limit = 8);

// moment / integrate, evaluated without the common normalization.
Complex expectation(const GaussianForm& form, const Monomial& mono, int degree_limit = 8);

// Build the form whose normalized measure has the given first and second
// moments of w = (z_1..z_n, conj(z_1)..conj(z_n)): mean_w is length 2n and
// cov_w is the 2n x 2n symmetric pairing E[dw_i dw_j].
GaussianForm from_covariance(const CVec& mean_w, const CMat& cov_w);

// Gaussian expectation of a product of factors with the given means and
// pairwise covariances cov(i,j) = E[df_i df_j].  Shared by the moment
// routines and by callers that already hold a covariance table.
Complex wick_expectation(const std::vector<Complex>& means, const CMat& cov);

} // namespace g2kit::gaussint
