#pragma once

#include <stdexcept>
#include <string>

namespace anticonc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: unknown names, out-of-range parameters, size caps.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Problem size outside what an exact solver accepts.
class SizeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Dimension or length mismatch between inputs.
class ShapeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// File could not be opened, read or written. The message names the path.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Quadrature or other numerical procedure failed to reach its tolerance.
/// Carries the best estimate obtained before giving up.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double partial_estimate, double error_estimate)
      : Error(what), partial_(partial_estimate), error_(error_estimate) {}
  double partial_estimate() const noexcept { return partial_; }
  double error_estimate() const noexcept { return error_; }

 private:
  double partial_;
  double error_;
};

/// Singular matrix where a nonsingular one is required.
class RankError : public NumericError {
 public:
  explicit RankError(const std::string& what) : NumericError(what, 0.0, 0.0) {}
};

/// A deterministic per-sample inequality or identity failed. Indicates a bug.
class ViolationError : public Error {
 public:
  using Error::Error;
};

/// Broken internal consistency (e.g. a functional that is not homogeneous).
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace anticonc
