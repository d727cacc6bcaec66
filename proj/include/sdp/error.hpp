#pragma once

#include <stdexcept>
#include <string>

namespace sdp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A query point lies outside the triangulated domain.
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

/// Grid breakpoints are unsorted, duplicated or too few.
class InvalidGrid : public Error {
 public:
  using Error::Error;
};

/// Mesh is degenerate, overlapping, non-conforming or does not cover its bounds.
class InvalidTriangulation : public Error {
 public:
  using Error::Error;
};

/// Non-finite data, vanishing denominators, failed decompositions.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// A physical or learning parameter is outside its admissible range.
class InvalidParam : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sdp
