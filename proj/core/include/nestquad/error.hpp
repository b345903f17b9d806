#pragma once

#include <stdexcept>
#include <string>

namespace nestquad {

enum class ErrorKind {
  ParameterDomain,
  Capacity,
  Numerical,
  NoConvergence,
  Feasibility,
  Symmetry,
  UnsupportedFamily,
  DegenerateJacobian,
  Evaluation,
  Io,
  Schema,
  Integrity,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library. The kind lets
/// callers (the CLI in particular) map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when no attempted exactness degree reached the residual tolerance.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& what, double best_residual)
      : Error(ErrorKind::NoConvergence, what), best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace nestquad
