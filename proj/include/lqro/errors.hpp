#pragma once

#include <stdexcept>
#include <string>

namespace lqro {

/// Argument outside the domain an operation is defined on (grid points
/// outside [0, t_f], mismatched lengths, non-positive shot counts).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Ill-conditioned or rank-deficient linear algebra.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Degenerate seed or noise calibration.
class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration. The message may aggregate
/// several validation failures, one per line.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lqro
