#pragma once

#include <stdexcept>
#include <string>

namespace ue {

// Root of every error raised by the library. Subclasses name the failure
// kinds that callers are expected to branch on.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// A value became NaN or infinite inside a computation that cannot recover.
class NonFinite : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Training or sampling went off the rails (non-finite loss, collapsed
// acceptance rate).
class Divergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class EmptyResult : public Error {
 public:
  using Error::Error;
};

class AssertionFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace ue
