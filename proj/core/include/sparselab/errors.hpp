#pragma once

#include <stdexcept>
#include <string>

namespace sparselab {

/// Base of every error raised by the library. The CLI maps subclasses onto
/// exit codes: ConfigError -> 2, the numerical family -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable input or unwritable output. The CLI maps it to exit code 4.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters, dimension mismatches, rejected generator rules.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Base of failures that come out of a computation rather than its inputs.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Spectral parameter too close to [0, 4d] or outside an operation's domain.
class SpectralParameterError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Quadrature or series failed to reach the requested accuracy.
class AccuracyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// 1 + G(lambda; 0) V(n) vanishes: lambda is the impurity level of V(n).
class ResonanceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The impurity equation has no root that can be resolved below zero.
class NoBoundStateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Level curve chart with vanishing gradient or curvature.
class RegularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Iterative or direct solver failed; the message carries the achieved residual.
class SolverError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Finite-box artifact: a box would be clipped or a wavefront would reach the edge.
class GeometryError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace sparselab
