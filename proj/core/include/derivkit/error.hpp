#pragma once

#include <stdexcept>
#include <string>

namespace derivkit {

/// Malformed or inconsistent input: shape/field mismatch, unknown object,
/// non-functorial data. The CLI maps this to exit status 2.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition of an operation does not hold for otherwise
/// well-formed input (a Toda condition fails, a map is not an inflation, ...).
class PreconditionFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal certificate failed to verify. Raised only when a computation
/// contradicts a theorem the library relies on, so it signals a bug.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace derivkit
