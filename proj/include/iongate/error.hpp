#pragma once

#include <stdexcept>
#include <string>

namespace iongate {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The Fock-space truncation is too small for the requested accuracy.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical method failed to converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data (datasets, fit files).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid user configuration or command-line usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace iongate
