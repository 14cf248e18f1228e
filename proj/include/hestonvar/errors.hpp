#pragma once

#include <stdexcept>
#include <string>

namespace hestonvar {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Parameter set violates an admissibility condition (Feller margin,
// correlation window, empty feasibility window, ...).
class InfeasibleError : public Error {
public:
    explicit InfeasibleError(const std::string& msg) : Error(msg) {}
};

// A numerical procedure failed (singular system, non-finite values,
// quadrature non-convergence).
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& msg) : Error(msg) {}
};

// Malformed configuration input.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

} // namespace hestonvar
