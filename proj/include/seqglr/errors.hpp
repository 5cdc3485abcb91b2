#pragma once

#include <stdexcept>
#include <string>

namespace seqglr {

// Base of every error raised by the library. Callers that only care about
// "something was wrong with the inputs" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// A root-finding request has no solution inside the mean domain.
class NoSolution : public Error {
 public:
  using Error::Error;
};

// The requested bound is vacuous (for example a zero separation with a
// constant boundary).
class Degenerate : public Error {
 public:
  using Error::Error;
};

class NonSummable : public Error {
 public:
  using Error::Error;
};

class InvalidHypotheses : public Error {
 public:
  using Error::Error;
};

class ObservationOutOfSupport : public Error {
 public:
  using Error::Error;
};

class NoFiniteSize : public Error {
 public:
  using Error::Error;
};

class GridExhausted : public Error {
 public:
  using Error::Error;
};

class OverlapError : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace seqglr
