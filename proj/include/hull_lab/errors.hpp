#pragma once

#include <stdexcept>
#include <string>

namespace hull_lab {

// Base class for all structured failures raised by lab operations.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// geometry
struct DimensionMismatchError : Error {
  using Error::Error;
};
struct NoSeparationError : Error {
  using Error::Error;
};

// grid
struct EmptyDomainError : Error {
  using Error::Error;
};
struct EmptyBoundaryError : Error {
  using Error::Error;
};
struct EvalError : Error {
  double x = 0.0, y = 0.0;
  EvalError(const std::string& msg, double px, double py) : Error(msg), x(px), y(py) {}
};
struct StencilError : Error {
  using Error::Error;
};
struct ArityError : Error {
  using Error::Error;
};

// hull_property
struct CollarTooThinError : Error {
  using Error::Error;
};

// dichotomy
struct NoCertificateError : Error {
  using Error::Error;
};
struct SublevelSamplingError : Error {
  using Error::Error;
};
struct CertificateInvalidError : Error {
  using Error::Error;
};
struct TheoremViolationError : Error {
  using Error::Error;
};

// transport
struct HypothesisError : Error {
  double x = 0.0, y = 0.0;
  HypothesisError(const std::string& msg, double px, double py) : Error(msg), x(px), y(py) {}
};

}  // namespace hull_lab
