#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace decoh {

using Complex = std::complex<double>;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the caller's input was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The numerics left their trusted regime (boundary leakage, Riccati blow-up,
/// basis truncation, failed self-checks).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Malformed or unknown configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace decoh
