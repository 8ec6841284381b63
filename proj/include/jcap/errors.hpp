#pragma once

#include <stdexcept>
#include <string>

namespace jcap {

/// Input outside the mathematical domain of an operation (bad θ, negative
/// argument, unsorted thresholds, ...). Reported by the CLI as a validation
/// error.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller violated an API contract, e.g. asked a continuous channel for an
/// output pmf.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Requested operation is not available for this channel or parameter space.
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Base for failures of a numerical procedure on valid input.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature ran out of subdivisions. Carries the best estimate.
class ToleranceError : public NumericalError {
public:
    ToleranceError(const std::string& what, double best_value, double best_error)
        : NumericalError(what), best_value_(best_value), best_error_(best_error) {}

    double best_value() const noexcept { return best_value_; }
    double best_error() const noexcept { return best_error_; }

private:
    double best_value_;
    double best_error_;
};

/// Jeffreys normalization is zero (J vanishes on all of Θ).
class DegenerateChannelError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// No finite tilt satisfies the average-power constraint.
class UnboundedTiltError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Iterative solver hit its iteration cap.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, double last_residual)
        : NumericalError(what), last_residual_(last_residual) {}

    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

/// Exact enumeration would exceed the configured evaluation budget.
class ResourceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace jcap
