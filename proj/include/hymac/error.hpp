#ifndef HYMAC_ERROR_HPP
#define HYMAC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace hymac {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on a numeric argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// No device in the contention mixture can transmit.
class DegenerateMixture : public Error {
 public:
  using Error::Error;
};

/// An expectation is infinite, e.g. two devices contending with p = 1.
class DivergentExpectation : public Error {
 public:
  using Error::Error;
};

/// Winner allocation asks for more devices than a class holds.
class InfeasibleAllocation : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent scenario, plan, or frame configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A ratio metric was requested over an empty denominator.
class UndefinedRatio : public Error {
 public:
  using Error::Error;
};

/// A frame trace does not satisfy its own accounting identities.
class TraceError : public Error {
 public:
  using Error::Error;
};

}  // namespace hymac

#endif  // HYMAC_ERROR_HPP
