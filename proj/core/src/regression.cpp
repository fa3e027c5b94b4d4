// regression.cpp — closed-form solutions of the moment ODEs and the
// stationary correlation structure built on them.
#include "g2kit/regression.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "g2kit/errors.hpp"
#include "g2kit/gaussint.hpp"

namespace g2kit::regression {

void validate_curve(const CorrelationCurve& curve) {
    const size_t n = curve.tau.size();
    if (n == 0) throw ConfigError("curve: empty");
    if (curve.tau.front() != 0.0) throw ConfigError("curve: grid must start at 0");
    for (size_t i = 1; i < n; ++i)
        if (!(curve.tau[i] > curve.tau[i - 1]))
            throw ConfigError("curve: grid must be strictly increasing");
    if (curve.g1.size() != n) throw ConfigError("curve: g1 length mismatch");
    if (!curve.g2.empty()) {
        if (curve.g2.size() != n) throw ConfigError("curve: g2 length mismatch");
        for (double v : curve.g2)
            if (!(v >= 0.0)) throw ConfigError("curve: g2 must be non-negative");
    }
    for (const auto* err : {&curve.g1_err, &curve.g2_err}) {
        if (err->empty()) continue;
        if (err->size() != n) throw ConfigError("curve: error column length mismatch");
        for (double v : *err)
            if (!(v >= 0.0)) throw ConfigError("curve: errors must be non-negative");
    }
}

std::string to_string(Correlation c) {
    switch (c) {
        case Correlation::bunched: return "bunched";
        case Correlation::antibunched: return "antibunched";
        case Correlation::flat: return "flat";
    }
    throw ConfigError("unknown correlation class");
}

std::string to_string(Statistics s) {
    switch (s) {
        case Statistics::poissonian: return "Poissonian";
        case Statistics::super_poissonian: return "super-Poissonian";
        case Statistics::sub_poissonian: return "sub-Poissonian";
    }
    throw ConfigError("unknown statistics class");
}

std::string to_string(const Classification& c) {
    return to_string(c.correlation) + ", " + to_string(c.statistics);
}

MomentState evolve_moments(const SystemParams& p, const MomentState& s0, double t) {
    validate_params(p);
    validate_moment_state(s0);
    if (t < 0.0) throw DomainError("t must be non-negative");

    const TransferCoeffs tc = transfer_coeffs(p, t);
    const double lm = p.lambda_minus();
    const double lp = p.lambda_plus();

    // Mean: the same two-exponential map as the field itself.
    MomentState s;
    s.mean = tc.a_plus * s0.mean + tc.a_minus * std::conj(s0.mean);

    // Second moments decouple in the channels c1 = (Re m2 + n)/2 with rate
    // lambda_minus, c2 = (Re m2 - n)/2 with rate lambda_plus, and Im m2 with
    // rate mu; each relaxes exponentially to its own fixed point.
    const double c1_0 = 0.5 * (s0.m2.real() + s0.n);
    const double c2_0 = 0.5 * (s0.m2.real() - s0.n);
    const double im_0 = s0.m2.imag();

    const double c1_ss = (p.C - p.B.real()) / (2.0 * lm);
    const double c2_ss = -(p.C + p.B.real()) / (2.0 * lp);
    const double im_ss = -p.B.imag() / p.mu;

    const double c1 = c1_ss + std::exp(-lm * t) * (c1_0 - c1_ss);
    const double c2 = c2_ss + std::exp(-lp * t) * (c2_0 - c2_ss);
    const double im = im_ss + std::exp(-p.mu * t) * (im_0 - im_ss);

    s.n = c1 - c2;
    s.m2 = Complex(c1 + c2, im);
    validate_moment_state(s, 1e-8);
    return s;
}

MomentState steady_state(const SystemParams& p) {
    validate_params(p);
    MomentState s;
    s.mean = Complex(0.0, 0.0);
    s.n = (p.mu * p.C - 2.0 * p.beta * p.B.real()) /
          (p.mu * p.mu - 4.0 * p.beta * p.beta);
    s.m2 = (2.0 * p.beta * s.n - p.B) / p.mu;
    validate_moment_state(s);
    return s;
}

TwoTimePair two_time_pair(const SystemParams& p, double tau) {
    const MomentState ss = steady_state(p);
    const TransferCoeffs tc = transfer_coeffs(p, tau);
    TwoTimePair pair;
    pair.c_normal = tc.a_plus * ss.n + tc.a_minus * std::conj(ss.m2);
    pair.c_anom = tc.a_plus * ss.m2 + tc.a_minus * ss.n;
    return pair;
}

namespace {

double require_nonzero_n(const MomentState& ss) {
    if (!(ss.n > 0.0))
        throw DomainError("zero denominator: steady-state occupation vanishes (C = 0)");
    return ss.n;
}

} // namespace

CorrelationCurve g1_curve(const SystemParams& p, const TauGrid& grid) {
    const auto pts = grid_points(grid);
    const double n_ss = require_nonzero_n(steady_state(p));
    CorrelationCurve curve;
    curve.n_ss = n_ss;
    curve.tau = pts;
    curve.g1.reserve(pts.size());
    for (double tau : pts)
        curve.g1.push_back(two_time_pair(p, tau).c_normal / n_ss);
    validate_curve(curve);
    return curve;
}

CorrelationCurve g2_curve(const SystemParams& p, const TauGrid& grid) {
    const auto pts = grid_points(grid);
    const double n_ss = require_nonzero_n(steady_state(p));
    CorrelationCurve curve;
    curve.n_ss = n_ss;
    curve.tau = pts;
    curve.g1.reserve(pts.size());
    curve.g2.reserve(pts.size());
    for (double tau : pts) {
        const TwoTimePair pair = two_time_pair(p, tau);
        curve.g1.push_back(pair.c_normal / n_ss);
        curve.g2.push_back(1.0 + (std::norm(pair.c_normal) + std::norm(pair.c_anom)) /
                                     (n_ss * n_ss));
    }
    validate_curve(curve);
    return curve;
}

double g2_zero_number_formula(double n) {
    if (!(n > 0.0)) throw DomainError("occupation must be positive");
    return 1.0 - 1.0 / n;
}

Classification classify(const CorrelationCurve& curve, double tol) {
    validate_curve(curve);
    if (curve.g2.empty()) throw ConfigError("classify: curve has no g2 values");
    if (!(tol >= 0.0)) throw ConfigError("classify: tolerance must be non-negative");

    const double head = curve.g2.front();
    const double tail = curve.g2.back();

    Classification cls;
    if (tail < head - tol)
        cls.correlation = Correlation::bunched;
    else if (tail > head + tol)
        cls.correlation = Correlation::antibunched;
    else
        cls.correlation = Correlation::flat;

    if (head > 1.0 + tol)
        cls.statistics = Statistics::super_poissonian;
    else if (head < 1.0 - tol)
        cls.statistics = Statistics::sub_poissonian;
    else
        cls.statistics = Statistics::poissonian;
    return cls;
}

double g2_transient(const SystemParams& p, const MomentState& s0, double t, double tau) {
    const MomentState st = evolve_moments(p, s0, t);
    const MomentState stt = evolve_moments(p, st, tau);
    if (!(st.n > 0.0) || !(stt.n > 0.0))
        throw DomainError("zero denominator: occupation vanishes at a requested time");

    const TransferCoeffs tc = transfer_coeffs(p, tau);

    // Centered covariances at t and their propagation across the delay; the
    // fluctuation obeys the same linear transfer as the field.
    const Complex m2c_t = st.m2 - st.mean * st.mean;
    const double nc_t = st.n - std::norm(st.mean);
    const Complex m2c_tt = stt.m2 - stt.mean * stt.mean;
    const double nc_tt = stt.n - std::norm(stt.mean);
    const Complex cross_normal = tc.a_plus * nc_t + tc.a_minus * std::conj(m2c_t);
    const Complex cross_anom = tc.a_plus * m2c_t + tc.a_minus * nc_t;

    // Factors of the fourth moment, in operator order:
    // conj(a_t), conj(a_{t+tau}), a_{t+tau}, a_t.
    const std::vector<Complex> means = {std::conj(st.mean), std::conj(stt.mean),
                                        stt.mean, st.mean};
    gaussint::CMat cov(4, 4);
    cov(0, 0) = std::conj(m2c_t);
    cov(0, 1) = std::conj(cross_anom);
    cov(0, 2) = cross_normal;
    cov(0, 3) = nc_t;
    cov(1, 1) = std::conj(m2c_tt);
    cov(1, 2) = nc_tt;
    cov(1, 3) = std::conj(cross_normal);
    cov(2, 2) = m2c_tt;
    cov(2, 3) = cross_anom;
    cov(3, 3) = m2c_t;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < i; ++j) cov(i, j) = cov(j, i);

    const Complex fourth = gaussint::wick_expectation(means, cov);
    return fourth.real() / (st.n * stt.n);
}

} // namespace g2kit::regression
