#pragma once

#include <stdexcept>
#include <string>

namespace mbq {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model or configuration failed a structural precondition
/// (non-stochastic row, negative probability, discount out of range,
/// invalid dimensions).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Two containers that must share a shape do not.
class SizeMismatchError : public Error {
 public:
  using Error::Error;
};

/// A state, action, or pair index is out of range.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// A sampler was used in the wrong mode.
class ModeError : public Error {
 public:
  using Error::Error;
};

/// A scalar argument is outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// epsilon lies outside the validity window of a concentration bound.
/// Carries the admissible interval [0, eps_max] for epsilon.
class EpsOutOfValidityError : public RangeError {
 public:
  EpsOutOfValidityError(const std::string& what, double eps_max)
      : RangeError(what), eps_max_(eps_max) {}
  double eps_max() const { return eps_max_; }

 private:
  double eps_max_;
};

/// An iterative solver exceeded its iteration cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// The comparison systems failed to bracket the main iterate.  This is
/// an implementation-bug signal, never expected behavior.
class SandwichViolationError : public Error {
 public:
  SandwichViolationError(const std::string& what, long step, int entry)
      : Error(what), step_(step), entry_(entry) {}
  long step() const { return step_; }
  int entry() const { return entry_; }

 private:
  long step_;
  int entry_;
};

}  // namespace mbq
