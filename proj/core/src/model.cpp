#include "g2kit/model.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "g2kit/errors.hpp"

namespace g2kit {

void validate_params(const SystemParams& p) {
    if (!(p.mu > 0.0))
        throw DomainError("unstable: mu must be positive, got mu=" + std::to_string(p.mu));
    if (!(p.beta >= 0.0))
        throw DomainError("unstable: beta must be non-negative, got beta=" + std::to_string(p.beta));
    if (!(p.mu - 2.0 * p.beta > 0.0))
        throw DomainError("unstable: lambda_minus = mu - 2*beta = " +
                          std::to_string(p.mu - 2.0 * p.beta) + " must be positive");
    if (!(p.C >= 0.0))
        throw DomainError("noise: C must be non-negative, got C=" + std::to_string(p.C));
    if (!(p.C >= std::abs(p.B)))
        throw DomainError("noise: covariance not positive semidefinite, requires C >= |B| "
                          "(C=" + std::to_string(p.C) + ", |B|=" + std::to_string(std::abs(p.B)) + ")");
}

void validate_moment_state(const MomentState& s, double slack) {
    const double scale = std::max(1.0, s.n);
    const double tol = slack * scale;
    if (!(s.n >= -tol))
        throw DomainError("moment state: n must be non-negative");
    const double excess = s.n - std::norm(s.mean);
    if (excess < -tol)
        throw DomainError("moment state: n < |mean|^2");
    if (std::abs(s.m2 - s.mean * s.mean) > excess + tol)
        throw DomainError("moment state: |m2 - mean^2| exceeds n - |mean|^2");
}

std::vector<double> grid_points(const TauGrid& grid) {
    if (!(grid.tau_max > 0.0))
        throw ConfigError("grid: tau_max must be positive");
    if (grid.steps <= 1)
        throw ConfigError("grid: steps must exceed 1");
    std::vector<double> pts(static_cast<size_t>(grid.steps) + 1);
    for (int i = 0; i <= grid.steps; ++i)
        pts[static_cast<size_t>(i)] = grid.tau_max * static_cast<double>(i) /
                                      static_cast<double>(grid.steps);
    return pts;
}

TransferCoeffs transfer_coeffs(const SystemParams& p, double tau) {
    validate_params(p);
    if (tau < 0.0) throw DomainError("tau must be non-negative");
    TransferCoeffs tc;
    tc.lambda_minus = p.lambda_minus();
    tc.lambda_plus = p.lambda_plus();
    tc.tau = tau;
    const double em = std::exp(-0.5 * tc.lambda_minus * tau);
    const double ep = std::exp(-0.5 * tc.lambda_plus * tau);
    tc.a_plus = 0.5 * (em + ep);
    tc.a_minus = 0.5 * (em - ep);
    return tc;
}

std::string to_json_string(const SystemParams& p) {
    nlohmann::json j;
    j["mu"] = p.mu;
    j["beta"] = p.beta;
    j["B_re"] = p.B.real();
    j["B_im"] = p.B.imag();
    j["C"] = p.C;
    return j.dump();
}

SystemParams params_from_json_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("params: invalid JSON: ") + e.what());
    }
    SystemParams p;
    try {
        p.mu = j.at("mu").get<double>();
        p.beta = j.at("beta").get<double>();
        p.B = Complex(j.at("B_re").get<double>(), j.at("B_im").get<double>());
        p.C = j.at("C").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("params: missing or malformed field: ") + e.what());
    }
    return p;
}

} // namespace g2kit
