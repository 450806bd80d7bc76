#pragma once

#include <stdexcept>
#include <string>

namespace growthlab {

/// A caller violated an operation's stated precondition.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Evaluation point lies outside a function's valid domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterative solver hit its iteration cap.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double lo, double hi)
        : std::runtime_error(what), lo_(lo), hi_(hi) {}

    double bracket_lo() const noexcept { return lo_; }
    double bracket_hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

/// Adaptive quadrature ran out of panels before meeting its tolerance.
/// Carries the best estimate reached.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double partial_log_value, double partial_rel_error)
        : std::runtime_error(what), log_value_(partial_log_value), rel_error_(partial_rel_error) {}

    double partial_log_value() const noexcept { return log_value_; }
    double partial_rel_error() const noexcept { return rel_error_; }

private:
    double log_value_;
    double rel_error_;
};

} // namespace growthlab
