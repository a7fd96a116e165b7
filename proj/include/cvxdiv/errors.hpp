#pragma once

#include <stdexcept>
#include <string>

namespace cvxdiv {

/// A caller-supplied parameter violates an operation's precondition.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A generator passed to a builder is convex but not strictly convex.
class NotStrictlyConvex : public InvalidParameter {
 public:
  using InvalidParameter::InvalidParameter;
};

/// Malformed configuration: unknown generator spec, bad CLI option value.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data that cannot be ingested (unparsable token, non-finite value).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature did not converge, or an enumeration is too large to run.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cvxdiv
