#pragma once

#include <stdexcept>
#include <string>

namespace biodose {

/// Invalid input: bad arguments, malformed files, contract violations.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure: singular systems, non-positive curvature, unreachable targets.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Singular or near-singular linear system; carries a condition estimate.
class SingularMatrixError : public NumericError {
 public:
  SingularMatrixError(const std::string& what, double condition_estimate)
      : NumericError(what + " (condition estimate " + std::to_string(condition_estimate) + ")"),
        condition_(condition_estimate) {}
  double condition_estimate() const { return condition_; }

 private:
  double condition_;
};

}  // namespace biodose
