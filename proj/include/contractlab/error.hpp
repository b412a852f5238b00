#pragma once

#include <stdexcept>
#include <string>

namespace contractlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (bad shape, non-finite values, ragged rows, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A theorem hypothesis required by the operation does not hold for the input
/// (e.g. non-constant row sums for a closed-form contractivity).
class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical kernel failed to converge.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// An exhaustive enumeration would exceed its budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace contractlab
