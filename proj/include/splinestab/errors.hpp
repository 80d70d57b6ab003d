#pragma once

#include <stdexcept>
#include <string>

namespace splinestab {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: unisolvency, conditioning, divergence.
class NumericalError : public Error {
public:
  using Error::Error;
};

class UnisolvencyError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class IllConditionedError : public NumericalError {
public:
  IllConditionedError(const std::string& msg, double estimate)
      : NumericalError(msg), estimate_(estimate) {}
  double estimate() const { return estimate_; }

private:
  double estimate_;
};

/// File and stream failures; message names the offending path.
class IoError : public Error {
public:
  using Error::Error;
};

} // namespace splinestab
