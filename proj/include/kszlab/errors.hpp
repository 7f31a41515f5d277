#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kszlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside an operation's domain (shape mismatch, p < 2 where the
/// formula needs p >= 2, unmet hypotheses, ...).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Exhaustive enumeration would exceed the configured vertex budget.
class BudgetExceeded : public Error {
public:
  BudgetExceeded(const std::string& what, double required_log2)
      : Error(what), required_log2_(required_log2) {}

  /// log2 of the number of vertices the enumeration would need.
  double required_log2() const noexcept { return required_log2_; }

private:
  double required_log2_;
};

/// An iterative method hit its iteration cap before meeting its tolerance.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double best_estimate)
      : Error(what), best_estimate_(best_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }

private:
  double best_estimate_;
};

}  // namespace kszlab
