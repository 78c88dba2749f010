#pragma once

#include <stdexcept>
#include <string>

namespace vflip {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model does not satisfy an assumption required by the requested operation.
class AssumptionError : public Error {
 public:
  using Error::Error;
};

class PinningViolation : public AssumptionError {
 public:
  using AssumptionError::AssumptionError;
};

class DegenerateMode : public AssumptionError {
 public:
  using AssumptionError::AssumptionError;
};

class ValidationRequired : public AssumptionError {
 public:
  using AssumptionError::AssumptionError;
};

/// A numerical procedure failed to reach its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BracketFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepTooLarge : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class MissingAsymptotics : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace vflip
