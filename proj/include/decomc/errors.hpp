// errors.hpp - exception types shared across the library

#pragma once

#include <stdexcept>
#include <string>

namespace decomc {

// Adaptive quadrature could not meet its error target.
struct QuadratureFailure : std::runtime_error {
    explicit QuadratureFailure(const std::string& what) : std::runtime_error(what) {}
};

// Iterative solver or contour tail test failed to converge.
struct NonConvergence : std::runtime_error {
    explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

// Fock shell enumeration would exceed the configured guard.
struct ShellTooLarge : std::runtime_error {
    explicit ShellTooLarge(const std::string& what) : std::runtime_error(what) {}
};

// Canonical Fock sum dropped more tail weight than allowed.
struct TruncationError : std::runtime_error {
    explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

// Least-squares fit has no resolvable slope (e.g. all abscissas equal).
struct DegenerateFit : std::runtime_error {
    explicit DegenerateFit(const std::string& what) : std::runtime_error(what) {}
};

// Scenario configuration failed to parse or validate.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace decomc
