#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace cbsars {

/// Bad argument or malformed input to a library operation.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The objective returned a non-finite value. Carries the offending point.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, Eigen::VectorXd point)
        : std::runtime_error(what), point_(std::move(point)) {}

    const Eigen::VectorXd& point() const noexcept { return point_; }

private:
    Eigen::VectorXd point_;
};

/// An internal invariant was broken (e.g. a non-positive step-size multiplier).
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Too few samples to form the requested estimate.
class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A normalized or unnormalized state sits exactly at the reference point.
class DegenerateState : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cbsars
