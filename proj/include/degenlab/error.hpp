#pragma once

#include <stdexcept>
#include <string>

namespace degenlab {

/// Base of every error thrown by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation point outside the declared domain box.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument value (negative epsilon, t < 0, empty face set, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data caught at construction (non-PSD sampled entry, bad CSV).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A configured size cap was exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Requested combination is outside the supported model (e.g. cross terms in 2D).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver did not reach its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Leapfrog iteration blew up.
class CflError : public Error {
 public:
  using Error::Error;
};

/// Scenario JSON does not match the schema; `field` names the offending path.
class SchemaError : public Error {
 public:
  SchemaError(std::string field, const std::string& what)
      : Error("schema error at '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Numerical evidence was ambiguous (quadrature tail neither converging nor diverging).
class InconclusiveError : public Error {
 public:
  using Error::Error;
};

}  // namespace degenlab
