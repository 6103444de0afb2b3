#pragma once

#include <stdexcept>
#include <string>

namespace curvedq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// geometry
class DegenerateChart : public Error {
 public:
  using Error::Error;
};
class OutOfDomain : public Error {
 public:
  using Error::Error;
};
class NonPositiveFactor : public Error {
 public:
  using Error::Error;
};

// em_fields
class QuadratureFailure : public Error {
 public:
  using Error::Error;
};
class PeriodicityViolation : public Error {
 public:
  using Error::Error;
};

// discretization
class BadResolution : public Error {
 public:
  using Error::Error;
};
class GridMismatch : public Error {
 public:
  using Error::Error;
};
class NonHermitianAssembly : public Error {
 public:
  using Error::Error;
};

// solvers
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};
class LinearSolveFailure : public Error {
 public:
  using Error::Error;
};

// cli
class ConfigError : public Error {
 public:
  using Error::Error;
};
class TaskError : public Error {
 public:
  using Error::Error;
};

}  // namespace curvedq
