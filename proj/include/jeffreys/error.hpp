#pragma once

#include <stdexcept>
#include <string>

namespace jeffreys {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad CSV, invariant violations, rank deficiency.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The expected information X^T W X lost rank at the current iterate.
class SingularInformationError : public Error {
 public:
  using Error::Error;
};

/// Inference was requested from a fit that cannot support it.
class InferenceError : public Error {
 public:
  using Error::Error;
};

/// The separation linear program could not be solved reliably.
class LpError : public Error {
 public:
  using Error::Error;
};

}  // namespace jeffreys
