#pragma once

#include <stdexcept>
#include <string>

namespace closedrange {

/// Argument outside the mathematical domain of an operation (e.g. |z| >= 1).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid configuration or descriptor; `field()` names the offending path.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Iterative search failed (root subdivision depth, Newton).
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument-principle contour kept passing through a zero.
class ContourError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation too close to an essential singularity.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

}  // namespace closedrange
