#pragma once

#include <stdexcept>
#include <string>

namespace hyperu {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violates a documented precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The requested cutoff admits no reciprocal-lattice wave vector.
class EmptyGridError : public Error {
 public:
  using Error::Error;
};

/// A spectral quantity was requested for a pattern without points.
class EmptyPatternError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver did not converge or produced a non-finite value.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A point-process simulator could not produce a valid realization.
class SimulationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace hyperu
