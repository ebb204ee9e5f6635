#ifndef SDDEM_ERRORS_HPP
#define SDDEM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sddem {

// Bad numeric input (non-finite vector, delta_hat >= 1, ...).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid run setup: step not a fraction of tau, non-dividing coarsen
// factor, mode/problem mismatch, malformed config file.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// (mu, phi) pair violates its own constraints, e.g. phi(step) < mu(1).
struct PolicyError : std::runtime_error {
    explicit PolicyError(const std::string& msg) : std::runtime_error(msg) {}
};

// Stability parameters outside the feasible region of the rate equations.
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation that cannot tolerate non-finite states met one (e.g. the
// reference path of an error estimate blew up).
struct OverflowError : std::runtime_error {
    explicit OverflowError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace sddem

#endif
