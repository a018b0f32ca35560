#pragma once

#include <stdexcept>
#include <string>

namespace rgml {

/// Malformed arguments: dimension mismatch, non-finite entries, bad labels.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// A positivity-requiring operation met a matrix outside the SPD cone.
class NotPositiveDefinite : public std::domain_error {
 public:
  NotPositiveDefinite(const std::string& what, double eigenvalue)
      : std::domain_error(what + " (eigenvalue " + std::to_string(eigenvalue) + ")"),
        eigenvalue_(eigenvalue) {}

  double eigenvalue() const { return eigenvalue_; }

 private:
  double eigenvalue_;
};

/// An internal health check failed (e.g. a quadratic form that should be positive).
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rgml
