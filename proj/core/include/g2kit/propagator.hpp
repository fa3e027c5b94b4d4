// propagator.hpp — coherent-state propagator route: Gaussian kernels for
// quadratic dynamics, their composition by completeness relations, and the
// two-time first-order correlation evaluated as a five-variable Gaussian
// integral chain.
#pragma once

#include <functional>

#include "g2kit/model.hpp"

namespace g2kit::propagator {

// Matrix element K(alpha, t | beta, 0) between coherent states:
//   K = scale * exp(-|alpha|^2/2 - |beta|^2/2 + u conj(alpha) beta
//                   + v conj(alpha)^2 + w beta^2
//                   + lin_bra conj(alpha) + lin_ket beta).
// At t = 0 this is the bare overlap: u = 1, everything else trivial.
struct PropagatorKernel {
    double t = 0.0;
    Complex u{1.0, 0.0};
    Complex v{0.0, 0.0};
    Complex w{0.0, 0.0};
    Complex lin_bra{0.0, 0.0};
    Complex lin_ket{0.0, 0.0};
    Complex scale{1.0, 0.0};
};

// Pointwise kernel value.
Complex evaluate(const PropagatorKernel& k, Complex alpha, Complex beta);

// Rotation generated by omega * (number operator): u = e^{-i omega t}.
PropagatorKernel kernel_free(double omega, double t);

// Kernel of the noiseless drift of `p` plus a rotation omega. Defined by
// the requirement that the induced map on a coherent amplitude equals the
// two-exponential transfer map. A nonzero conjugate coupling fixes the
// phase frame, so beta != 0 requires omega = 0 (DomainError otherwise).
PropagatorKernel kernel_damped(const SystemParams& p, double omega, double t);

// Completeness-relation composition: integrates out the midpoint of
// inner (applied first, at t1) and outer (at t2); returns the kernel at
// t1 + t2. All integrals run through the Gaussian engine.
PropagatorKernel compose(const PropagatorKernel& inner, const PropagatorKernel& outer);

// Mean amplitude of the state the kernel produces from |alpha0>, i.e. the
// normalized expectation of the field after one application.
Complex propagated_mean(const PropagatorKernel& k, Complex alpha0);

// A kernel for every elapsed time, sharing one generator.
struct KernelFamily {
    std::function<PropagatorKernel(double)> at;
};

KernelFamily free_family(double omega);
KernelFamily damped_family(const SystemParams& p, double omega = 0.0);

// <a_dag(t+tau) a(t)> for the initial coherent state |alpha0>, evaluated by
// inserting coherent-state completeness around every operator: a
// five-variable Gaussian integral (numerator) normalized by the same chain
// without the field insertions. Free evolution gives |alpha0|^2 e^{i omega tau}.
Complex g1_via_chain(const KernelFamily& family, Complex alpha0, double t, double tau);

} // namespace g2kit::propagator
