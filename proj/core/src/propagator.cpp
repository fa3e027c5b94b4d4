// propagator.cpp — Gaussian coherent-state kernels, composition via the
// midpoint integral, and the five-variable correlation chain.
#include "g2kit/propagator.hpp"

#include <cmath>
#include <complex>

#include "g2kit/errors.hpp"
#include "g2kit/gaussint.hpp"

namespace g2kit::propagator {

namespace {

using std::conj;
using std::exp;

// Midpoint integral with the exterior legs held at probe values: the bra
// variable of the outer kernel contributes through abar, the ket variable
// of the inner kernel through gamma.  Everything involving the integrated
// midpoint lives in a one-variable Gaussian form.
Complex midpoint_integral(const PropagatorKernel& inner, const PropagatorKernel& outer,
                          Complex abar, Complex gamma) {
    gaussint::GaussianForm f(1);
    f.F(0, 0) = outer.w;
    f.G(0, 0) = inner.v;
    f.b(0) = outer.u * abar + outer.lin_ket;
    f.c(0) = inner.u * gamma + inner.lin_bra;
    return gaussint::integrate(f);
}

} // namespace

Complex evaluate(const PropagatorKernel& k, Complex alpha, Complex beta) {
    const Complex abar = conj(alpha);
    return k.scale * exp(-0.5 * std::norm(alpha) - 0.5 * std::norm(beta)
                         + k.u * abar * beta + k.v * abar * abar + k.w * beta * beta
                         + k.lin_bra * abar + k.lin_ket * beta);
}

PropagatorKernel kernel_free(double omega, double t) {
    PropagatorKernel k;
    k.t = t;
    k.u = exp(Complex(0.0, -omega * t));
    return k;
}

PropagatorKernel kernel_damped(const SystemParams& p, double omega, double t) {
    validate_params(p);
    if (p.beta != 0.0 && omega != 0.0)
        throw DomainError("damped kernel: conjugate coupling fixes the phase frame, omega must be 0");
    const TransferCoeffs tc = transfer_coeffs(p, t);
    PropagatorKernel k;
    k.t = t;
    k.u = exp(Complex(0.0, -omega * t)) * std::exp(-p.mu * t) / tc.a_plus;
    k.v = tc.a_minus / (2.0 * tc.a_plus);
    k.w = -k.v;
    // 1 - 4 v^2 = e^{-mu t} / a_plus^2 > 0, so the quartic root is real.
    k.scale = std::pow(1.0 - 4.0 * std::norm(k.v), 0.25);
    return k;
}

PropagatorKernel compose(const PropagatorKernel& inner, const PropagatorKernel& outer) {
    // The composed kernel keeps the exterior quadratic/linear terms of each
    // factor; the midpoint integral contributes multiplicatively
    //   I(abar, gamma) = I(0,0) exp(du abar gamma + dv abar^2 + dw gamma^2
    //                               + dp abar + dq gamma).
    // Recover the five exponent corrections from logarithms of probe
    // ratios, shrinking the probe when a ratio winds too far for the
    // principal branch to be trusted.
    const Complex base = midpoint_integral(inner, outer, 0.0, 0.0);
    double h = 0.3;
    Complex du, dv, dw, dp, dq;
    bool ok = false;
    for (int attempt = 0; attempt < 6 && !ok; ++attempt, h *= 0.5) {
        const Complex lxp = std::log(midpoint_integral(inner, outer, +h, 0.0) / base);
        const Complex lxm = std::log(midpoint_integral(inner, outer, -h, 0.0) / base);
        const Complex lyp = std::log(midpoint_integral(inner, outer, 0.0, +h) / base);
        const Complex lym = std::log(midpoint_integral(inner, outer, 0.0, -h) / base);
        const Complex lxy = std::log(midpoint_integral(inner, outer, +h, +h) / base);
        const double wind = std::max({std::abs(lxp.imag()), std::abs(lxm.imag()),
                                      std::abs(lyp.imag()), std::abs(lym.imag()),
                                      std::abs(lxy.imag())});
        if (wind >= 2.5) continue;
        dv = (lxp + lxm) / (2.0 * h * h);
        dp = (lxp - lxm) / (2.0 * h);
        dw = (lyp + lym) / (2.0 * h * h);
        dq = (lyp - lym) / (2.0 * h);
        du = (lxy - (dv + dw) * h * h - (dp + dq) * h) / (h * h);
        // Cross-check on an independent probe: the recovered exponent must
        // reproduce the integral off the sampled axes.
        const Complex probe = midpoint_integral(inner, outer, Complex(0.0, h), -h);
        const Complex predicted =
            base * exp(du * Complex(0.0, h) * (-h) - dv * h * h
                       + dw * h * h + dp * Complex(0.0, h) - dq * h);
        if (std::abs(probe - predicted) > 1e-8 * std::max(1.0, std::abs(predicted))) continue;
        ok = true;
    }
    if (!ok)
        throw SingularError("kernel composition: probe recovery of the midpoint integral failed");

    PropagatorKernel k;
    k.t = inner.t + outer.t;
    k.u = du;
    k.v = outer.v + dv;
    k.w = inner.w + dw;
    k.lin_bra = outer.lin_bra + dp;
    k.lin_ket = inner.lin_ket + dq;
    k.scale = inner.scale * outer.scale * base;
    return k;
}

Complex propagated_mean(const PropagatorKernel& k, Complex alpha0) {
    // Tr[K rho K_dag a] / Tr[K rho K_dag] as a two-variable Gaussian
    // expectation: z0 carries the ket-side kernel, z1 the bra side, and the
    // trace closes them against each other.
    gaussint::GaussianForm f(2);
    f.A(1, 0) -= 1.0;
    f.c(0) += k.u * alpha0 + k.lin_bra;
    f.G(0, 0) += k.v;
    f.b(1) += conj(k.u) * conj(alpha0) + conj(k.lin_bra);
    f.F(1, 1) += conj(k.v);
    gaussint::Monomial mono(2);
    mono.z_pow[0] = 1;
    return gaussint::expectation(f, mono);
}

KernelFamily free_family(double omega) {
    KernelFamily fam;
    fam.at = [omega](double s) { return kernel_free(omega, s); };
    return fam;
}

KernelFamily damped_family(const SystemParams& p, double omega) {
    validate_params(p);
    if (p.beta != 0.0 && omega != 0.0)
        throw DomainError("damped kernel: conjugate coupling fixes the phase frame, omega must be 0");
    KernelFamily fam;
    fam.at = [p, omega](double s) { return kernel_damped(p, omega, s); };
    return fam;
}

Complex g1_via_chain(const KernelFamily& family, Complex alpha0, double t, double tau) {
    if (!family.at) throw ConfigError("correlation chain: kernel family has no generator");
    const PropagatorKernel kt = family.at(t);
    const PropagatorKernel ku = family.at(tau);

    // Coherent-state completeness inserted around every operator of
    // <a_dag(t+tau) a(t)> leaves five integration variables:
    //   z0 closes the trace and carries the a insertion,
    //   z1 / z3 flank the initial state |alpha0><alpha0|,
    //   z2 links the two conjugated kernels,
    //   z4 carries the a_dag insertion.
    // Kernel scales and the initial-state normalization cancel against the
    // identical chain without insertions, which is exactly the
    // normalization `expectation` divides by.
    gaussint::GaussianForm f(5);

    // K(z0, t | z1)
    f.A(0, 1) -= kt.u;
    f.G(0, 0) += kt.v;
    f.F(1, 1) += kt.w;
    f.c(0) += kt.lin_bra;
    f.b(1) += kt.lin_ket;

    // conj K(z2, t | z3)
    f.A(3, 2) -= conj(kt.u);
    f.F(2, 2) += conj(kt.v);
    f.G(3, 3) += conj(kt.w);
    f.b(2) += conj(kt.lin_bra);
    f.c(3) += conj(kt.lin_ket);

    // K(z4, tau | z0)
    f.A(4, 0) -= ku.u;
    f.G(4, 4) += ku.v;
    f.F(0, 0) += ku.w;
    f.c(4) += ku.lin_bra;
    f.b(0) += ku.lin_ket;

    // conj K(z4, tau | z2)
    f.A(2, 4) -= conj(ku.u);
    f.F(4, 4) += conj(ku.v);
    f.G(2, 2) += conj(ku.w);
    f.b(4) += conj(ku.lin_bra);
    f.c(2) += conj(ku.lin_ket);

    // Overlaps with the initial coherent amplitude.
    f.c(1) += alpha0;
    f.b(3) += conj(alpha0);

    gaussint::Monomial mono(5);
    mono.z_pow[0] = 1;   // the a insertion
    mono.zbar_pow[4] = 1; // the a_dag insertion
    return gaussint::expectation(f, mono);
}

} // namespace g2kit::propagator
