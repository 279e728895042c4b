#pragma once

#include <stdexcept>
#include <string>

namespace mcflow {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two fields (or a field and a grid) that do not live on the same grid.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// NaN or Inf appeared in a field or an iterate.
class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

/// The interface the caller asked about no longer exists.
class VanishedInterface : public Error {
 public:
  using Error::Error;
};

/// Base for iterative solver failures; carries the last residual seen.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}

  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

}  // namespace mcflow
