#pragma once

#include <stdexcept>
#include <string>

namespace omnimatch {

// Input is structurally valid but numerically unusable (e.g. rank-deficient
// seed embedding). Distinct from std::invalid_argument, which covers
// shape/precondition violations.
class DegenerateInputError : public std::runtime_error {
 public:
  explicit DegenerateInputError(const std::string& what)
      : std::runtime_error(what) {}
};

// The requested quantity has no defined value on this input (zero-variance
// correlation, zero-denominator alignment strength, ...).
class UndefinedResultError : public std::runtime_error {
 public:
  explicit UndefinedResultError(const std::string& what)
      : std::runtime_error(what) {}
};

// A numerical backend failed to converge or reported an internal error.
class NumericFailureError : public std::runtime_error {
 public:
  explicit NumericFailureError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace omnimatch
