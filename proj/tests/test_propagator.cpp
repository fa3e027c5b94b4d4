// test_propagator.cpp — coherent-state kernels against Fock-space operator
// algebra, composition against the closed-form parameter algebra and 2D
// quadrature, and the five-variable correlation chain.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "g2kit/errors.hpp"
#include "g2kit/propagator.hpp"
#include "support/oracles.hpp"

using g2kit::Complex;
using g2kit::SystemParams;
namespace prop = g2kit::propagator;

namespace {

SystemParams standard_params() { return SystemParams{1.0, 0.2, Complex{0.0, 0.0}, 0.5}; }

// Closed-form composition of two kernels, by completing the square in the
// midpoint integral: the midpoint variable beta appears with coefficient
// b = u2 conj(alpha) + lk2 on beta, c = u1 gamma + lb1 on conj(beta),
// f = w2 on beta^2, g = v1 on conj(beta)^2, and unit |beta|^2 weight, so
// the scalar identity integral = (1-4fg)^{-1/2} exp((bc + f c^2 + g b^2)/D)
// expands into the composed parameters below.
prop::PropagatorKernel compose_reference(const prop::PropagatorKernel& inner,
                                         const prop::PropagatorKernel& outer) {
    const Complex f = outer.w, g = inner.v;
    const Complex b_lin = outer.lin_ket, c_lin = inner.lin_bra;
    const Complex D = 1.0 - 4.0 * f * g;
    prop::PropagatorKernel k;
    k.t = inner.t + outer.t;
    k.u = inner.u * outer.u / D;
    k.v = outer.v + g * outer.u * outer.u / D;
    k.w = inner.w + f * inner.u * inner.u / D;
    k.lin_bra = outer.lin_bra + outer.u * (c_lin + 2.0 * g * b_lin) / D;
    k.lin_ket = inner.lin_ket + inner.u * (b_lin + 2.0 * f * c_lin) / D;
    k.scale = inner.scale * outer.scale / std::sqrt(D) *
              std::exp((b_lin * c_lin + f * c_lin * c_lin + g * b_lin * b_lin) / D);
    return k;
}

double kernel_dist(const prop::PropagatorKernel& a, const prop::PropagatorKernel& b) {
    return std::max({std::abs(a.u - b.u), std::abs(a.v - b.v), std::abs(a.w - b.w),
                     std::abs(a.lin_bra - b.lin_bra), std::abs(a.lin_ket - b.lin_ket),
                     std::abs(a.scale - b.scale)});
}

// Midpoint composition by brute-force quadrature:
//   (K2 * K1)(alpha, gamma) = int d^2 beta / pi K2(alpha, beta) K1(beta, gamma).
Complex quad_compose_value(const prop::PropagatorKernel& inner,
                           const prop::PropagatorKernel& outer, Complex alpha, Complex gamma,
                           double L = 8.0, int npts = 160) {
    std::vector<double> x, w;
    oracles::gauss_legendre(npts, x, w);
    Complex total{0.0, 0.0};
    for (int i = 0; i < npts; ++i)
        for (int j = 0; j < npts; ++j) {
            const Complex beta{L * x[static_cast<size_t>(i)], L * x[static_cast<size_t>(j)]};
            total += w[static_cast<size_t>(i)] * w[static_cast<size_t>(j)] *
                     prop::evaluate(outer, alpha, beta) * prop::evaluate(inner, beta, gamma);
        }
    return total * (L * L / M_PI);
}

} // namespace

TEST_CASE("free kernel: rotation phase and zero-time overlap") {
    const prop::PropagatorKernel k0 = prop::kernel_free(1.3, 0.0);
    CHECK(std::abs(k0.u - Complex{1.0, 0.0}) < 1e-15);
    CHECK(std::abs(k0.scale - Complex{1.0, 0.0}) < 1e-15);

    const double omega = 0.9, t = 1.7;
    const prop::PropagatorKernel k = prop::kernel_free(omega, t);
    CHECK(std::abs(k.u - std::exp(Complex{0.0, -omega * t})) < 1e-15);
    CHECK(std::abs(k.v) < 1e-15);
    CHECK(std::abs(k.w) < 1e-15);

    // Zero-time kernel evaluates to the coherent overlap <alpha|beta>.
    const Complex alpha{0.4, 0.7}, beta{-0.3, 0.2};
    const Complex overlap = std::exp(-0.5 * std::norm(alpha) - 0.5 * std::norm(beta) +
                                     std::conj(alpha) * beta);
    CHECK(std::abs(prop::evaluate(k0, alpha, beta) - overlap) < 1e-15);
}

TEST_CASE("free kernel matches the Fock-space rotation operator") {
    const double omega = 1.0, t = 0.8;
    const prop::PropagatorKernel k = prop::kernel_free(omega, t);
    const int dim = 60;
    const Eigen::MatrixXcd op = oracles::kernel_op(k, dim);
    for (const Complex alpha : {Complex{0.5, 0.3}, Complex{-0.8, 0.1}}) {
        for (const Complex beta : {Complex{0.2, -0.6}, Complex{1.0, 0.4}}) {
            const Eigen::VectorXcd va = oracles::coherent_vec(alpha, dim);
            const Eigen::VectorXcd vb = oracles::coherent_vec(beta, dim);
            const Complex got = prop::evaluate(k, alpha, beta);
            const Complex want = (va.adjoint() * op * vb)(0, 0);
            CHECK(std::abs(got - want) < 1e-12);
        }
    }
}

TEST_CASE("damped kernel: identity at zero time, frozen parameters at tau = 1") {
    const SystemParams p = standard_params();
    const prop::PropagatorKernel k0 = prop::kernel_damped(p, 0.0, 0.0);
    CHECK(std::abs(k0.u - Complex{1.0, 0.0}) < 1e-15);
    CHECK(std::abs(k0.v) < 1e-15);
    CHECK(std::abs(k0.scale - Complex{1.0, 0.0}) < 1e-15);

    const prop::PropagatorKernel k = prop::kernel_damped(p, 0.0, 1.0);
    const double a_plus = 0.61870176223656369039, a_minus = 0.12211645844515417568;
    CHECK(std::abs(k.u - Complex{std::exp(-1.0) / a_plus, 0.0}) < 1e-13);
    CHECK(std::abs(k.v - Complex{a_minus / (2.0 * a_plus), 0.0}) < 1e-13);
    CHECK(std::abs(k.w + k.v) < 1e-15); // w = -v
    const double vmag = a_minus / (2.0 * a_plus);
    CHECK(std::abs(k.scale - Complex{std::pow(1.0 - 4.0 * vmag * vmag, 0.25), 0.0}) < 1e-13);

    // A rotation on top of the conjugate coupling has no consistent frame.
    CHECK_THROWS_AS(prop::kernel_damped(p, 0.5, 1.0), g2kit::DomainError);
    CHECK_NOTHROW(prop::kernel_damped(SystemParams{1.0, 0.0, Complex{0, 0}, 0.5}, 0.5, 1.0));
}

TEST_CASE("damped kernel matches the Fock-space squeeze-decay operator") {
    const SystemParams p = standard_params();
    const prop::PropagatorKernel k = prop::kernel_damped(p, 0.0, 0.7);
    const int dim = 100;
    const Eigen::MatrixXcd op = oracles::kernel_op(k, dim);
    for (const Complex alpha : {Complex{0.6, -0.2}, Complex{-0.4, 0.9}}) {
        for (const Complex beta : {Complex{0.3, 0.3}, Complex{-0.7, -0.1}}) {
            const Eigen::VectorXcd va = oracles::coherent_vec(alpha, dim);
            const Eigen::VectorXcd vb = oracles::coherent_vec(beta, dim);
            const Complex got = prop::evaluate(k, alpha, beta);
            const Complex want = (va.adjoint() * op * vb)(0, 0);
            CHECK(std::abs(got - want) < 1e-11);
        }
    }
}

TEST_CASE("propagated mean follows the two-exponential transfer map") {
    const SystemParams p = standard_params();
    for (double t : {0.2, 1.0, 2.5}) {
        const prop::PropagatorKernel k = prop::kernel_damped(p, 0.0, t);
        const auto tc = g2kit::transfer_coeffs(p, t);
        for (const Complex a0 :
             {Complex{1.0, 0.0}, Complex{0.3, -0.8}, Complex{-1.1, 0.4}, Complex{0.0, 1.2}}) {
            const Complex want = tc.a_plus * a0 + tc.a_minus * std::conj(a0);
            CHECK(std::abs(prop::propagated_mean(k, a0) - want) < 1e-9);
        }
    }
    // Free evolution only rotates, preserving the magnitude.
    const prop::PropagatorKernel kf = prop::kernel_free(2.0, 0.9);
    const Complex a0{0.7, -0.3};
    const Complex m = prop::propagated_mean(kf, a0);
    CHECK(std::abs(m - a0 * std::exp(Complex{0.0, -1.8})) < 1e-12);
    CHECK(std::abs(std::abs(m) - std::abs(a0)) < 1e-12);
}

TEST_CASE("propagated mean agrees with a Fock-space computation") {
    const SystemParams p = standard_params();
    const prop::PropagatorKernel k = prop::kernel_damped(p, 0.0, 0.6);
    const int dim = 100;
    const Eigen::MatrixXcd op = oracles::kernel_op(k, dim);
    const Eigen::MatrixXcd a = oracles::a_op(dim);
    for (const Complex a0 : {Complex{0.8, 0.2}, Complex{-0.5, 0.6}}) {
        const Eigen::VectorXcd psi = op * oracles::coherent_vec(a0, dim);
        const Complex want = (psi.adjoint() * a * psi)(0, 0) / (psi.adjoint() * psi)(0, 0);
        CHECK(std::abs(prop::propagated_mean(k, a0) - want) < 1e-10);
    }
}

TEST_CASE("composition: free kernels form a one-parameter group") {
    const double omega = 1.1;
    const prop::PropagatorKernel k1 = prop::kernel_free(omega, 0.4);
    const prop::PropagatorKernel k2 = prop::kernel_free(omega, 1.3);
    const prop::PropagatorKernel k12 = prop::compose(k1, k2);
    const prop::PropagatorKernel want = prop::kernel_free(omega, 1.7);
    CHECK(kernel_dist(k12, want) < 1e-12);
    CHECK(k12.t == doctest::Approx(1.7));
}

TEST_CASE("composition: damped kernels without conjugate coupling form a semigroup") {
    const SystemParams p{1.0, 0.0, Complex{0.0, 0.0}, 0.5};
    const prop::PropagatorKernel k1 = prop::kernel_damped(p, 0.7, 0.5);
    const prop::PropagatorKernel k2 = prop::kernel_damped(p, 0.7, 1.1);
    const prop::PropagatorKernel k12 = prop::compose(k1, k2);
    CHECK(kernel_dist(k12, prop::kernel_damped(p, 0.7, 1.6)) < 1e-11);
}

TEST_CASE("composition matches the closed-form parameter algebra") {
    // Synthetic kernels exercising every parameter, well inside convergence.
    prop::PropagatorKernel k1;
    k1.t = 0.3;
    k1.u = Complex{0.7, 0.2};
    k1.v = Complex{0.12, -0.05};
    k1.w = Complex{-0.08, 0.1};
    k1.lin_bra = Complex{0.2, 0.1};
    k1.lin_ket = Complex{-0.15, 0.05};
    k1.scale = Complex{0.9, 0.1};

    prop::PropagatorKernel k2;
    k2.t = 0.5;
    k2.u = Complex{0.6, -0.3};
    k2.v = Complex{-0.1, 0.07};
    k2.w = Complex{0.15, 0.04};
    k2.lin_bra = Complex{-0.1, 0.2};
    k2.lin_ket = Complex{0.25, -0.1};
    k2.scale = Complex{1.1, -0.2};

    const prop::PropagatorKernel got = prop::compose(k1, k2);
    const prop::PropagatorKernel want = compose_reference(k1, k2);
    CHECK(kernel_dist(got, want) < 1e-8);

    // And the composed kernel reproduces the midpoint integral pointwise.
    for (const Complex alpha : {Complex{0.4, -0.2}, Complex{-0.6, 0.5}}) {
        for (const Complex gamma : {Complex{0.3, 0.6}, Complex{-0.2, -0.4}}) {
            const Complex direct = prop::evaluate(got, alpha, gamma);
            const Complex quad = quad_compose_value(k1, k2, alpha, gamma);
            CHECK(std::abs(direct - quad) < 1e-8);
        }
    }
}

TEST_CASE("composition is associative") {
    const SystemParams p{1.0, 0.0, Complex{0.0, 0.0}, 0.5};
    const prop::PropagatorKernel a = prop::kernel_damped(p, 0.4, 0.3);
    const prop::PropagatorKernel b = prop::kernel_free(0.4, 0.6);
    prop::PropagatorKernel c = prop::kernel_damped(p, 0.4, 0.9);
    c.lin_ket = Complex{0.1, -0.05}; // a linear term must associate too
    const prop::PropagatorKernel left = prop::compose(prop::compose(a, b), c);
    const prop::PropagatorKernel right = prop::compose(a, prop::compose(b, c));
    CHECK(kernel_dist(left, right) < 1e-9);
}

TEST_CASE("composition rejects a divergent midpoint integral") {
    prop::PropagatorKernel k1, k2;
    k1.v = Complex{0.6, 0.0};
    k2.w = Complex{0.6, 0.0}; // 4 v1 w2 > 1: midpoint Gaussian no longer decays
    CHECK_THROWS_AS(prop::compose(k1, k2), g2kit::ConvergenceError);
}

TEST_CASE("correlation chain: free evolution gives a pure phase") {
    const prop::KernelFamily fam = prop::free_family(1.0);
    const Complex a0{1.0, 0.0};
    for (double tau : {0.0, M_PI / 4.0, M_PI / 2.0, M_PI}) {
        const Complex got = prop::g1_via_chain(fam, a0, 0.3, tau);
        const Complex want = std::norm(a0) * std::exp(Complex{0.0, tau});
        CHECK(std::abs(got - want) < 1e-12);
    }
    // Magnitude of the mean is preserved along the whole chain.
    const Complex far = prop::g1_via_chain(fam, Complex{0.6, -0.8}, 1.0, 2.0);
    CHECK(std::abs(std::abs(far) - 1.0) < 1e-12);
}

TEST_CASE("correlation chain: free evolution against the Fock-space oracle") {
    const double omega = 1.0, t = 0.3;
    const int dim = 60;
    const Complex a0{1.0, 0.0};
    const Eigen::MatrixXcd a = oracles::a_op(dim);
    for (double tau : {M_PI / 4.0, M_PI}) {
        // <adag(t+tau) a(t)> evaluated with explicit rotation operators.
        const Eigen::MatrixXcd ut = oracles::kernel_op(prop::kernel_free(omega, t), dim);
        const Eigen::MatrixXcd utau = oracles::kernel_op(prop::kernel_free(omega, tau), dim);
        const Eigen::VectorXcd psi = ut * oracles::coherent_vec(a0, dim);
        const Eigen::VectorXcd lhs = utau * psi;          // U(tau) U(t) |a0>
        const Eigen::VectorXcd rhs = utau * (a * psi);    // U(tau) a U(t) |a0>
        const Complex num = (lhs.adjoint() * a.adjoint() * rhs)(0, 0);
        const Complex den = (lhs.adjoint() * lhs)(0, 0);
        const Complex want = num / den;
        const Complex got = prop::g1_via_chain(prop::free_family(omega), a0, t, tau);
        CHECK(std::abs(got - want) < 1e-10);
    }
}

TEST_CASE("correlation chain: noiseless decay matches the transfer map") {
    // Without conjugate coupling the deterministic field is coherent at all
    // times, so <adag(t+tau) a(t)> = conj(m(t+tau)) m(t).
    const SystemParams p{1.0, 0.0, Complex{0.0, 0.0}, 0.5};
    const prop::KernelFamily fam = prop::damped_family(p, 0.3);
    const Complex a0{0.9, 0.5};
    for (double t : {0.2, 1.0}) {
        for (double tau : {0.0, 0.7, 2.0}) {
            const Complex mt = prop::propagated_mean(fam.at(t), a0);
            const Complex mtt = prop::propagated_mean(fam.at(t + tau), a0);
            const Complex want = std::conj(mtt) * mt;
            CHECK(std::abs(prop::g1_via_chain(fam, a0, t, tau) - want) < 1e-10);
        }
    }
}

TEST_CASE("correlation chain with conjugate coupling against the Fock oracle") {
    const SystemParams p = standard_params();
    const prop::KernelFamily fam = prop::damped_family(p);
    const int dim = 100;
    const Eigen::MatrixXcd a = oracles::a_op(dim);
    const Complex a0{0.8, -0.3};
    const double t = 0.4, tau = 0.6;

    const Eigen::MatrixXcd Tt = oracles::kernel_op(fam.at(t), dim);
    const Eigen::MatrixXcd Ttau = oracles::kernel_op(fam.at(tau), dim);
    const Eigen::VectorXcd psi = Tt * oracles::coherent_vec(a0, dim);
    const Eigen::VectorXcd lhs = Ttau * psi;
    const Eigen::VectorXcd rhs = Ttau * (a * psi);
    const Complex want = (lhs.adjoint() * a.adjoint() * rhs)(0, 0) / (lhs.adjoint() * lhs)(0, 0);
    const Complex got = prop::g1_via_chain(fam, a0, t, tau);
    CHECK(std::abs(got - want) < 1e-9);
}

TEST_CASE("correlation chain: zero initial amplitude yields zero") {
    CHECK(std::abs(prop::g1_via_chain(prop::free_family(0.7), Complex{0, 0}, 0.5, 1.0)) <
          1e-14);
    const SystemParams p{1.0, 0.0, Complex{0.0, 0.0}, 0.5};
    CHECK(std::abs(prop::g1_via_chain(prop::damped_family(p), Complex{0, 0}, 0.5, 1.0)) <
          1e-14);
}
