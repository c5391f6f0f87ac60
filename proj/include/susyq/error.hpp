#pragma once

#include <stdexcept>
#include <string>

namespace susyq {

/// Base class for all library errors. The CLI maps the subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input or configuration (exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical check failed (norm drift, boundary contamination, non-normalizable state; exit code 2).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing an artifact failed (exit code 3).
class IoError : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  GridMismatch() : Error("wavefunctions live on different grids") {}
};

}  // namespace susyq
