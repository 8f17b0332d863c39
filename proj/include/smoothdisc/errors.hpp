#pragma once

#include <stdexcept>
#include <string>

namespace smoothdisc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (odd B-spline order,
/// rational input where an irrational is required, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input outside the domain of a function, e.g. invert_L below phi(1).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A floating input cannot decide the requested quantity within its error
/// radius.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// A scan or enumeration would exceed its configured work budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class SingularBasis : public Error {
 public:
  using Error::Error;
};

}  // namespace smoothdisc
