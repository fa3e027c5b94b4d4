// errors.hpp — exception taxonomy shared by all g2kit modules.
#pragma once

#include <stdexcept>
#include <string>

namespace g2kit {

// Invalid physics input: unstable drift, non-PSD noise, negative lag, ...
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid run configuration (missing/extra sections, bad counts, bad grids).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A Gaussian integral does not converge (quadratic form not positive definite).
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// A linear solve inside the integral engine is singular or hopelessly conditioned.
struct SingularError : std::runtime_error {
    explicit SingularError(const std::string& what) : std::runtime_error(what) {}
};

// A moment/ordering request exceeds the supported polynomial degree.
struct DegreeError : std::runtime_error {
    explicit DegreeError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace g2kit
