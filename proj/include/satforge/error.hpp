#pragma once

#include <stdexcept>
#include <string>

namespace satforge {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (DIMACS, manifests, tables).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Incompatible matrix or tensor shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Unreadable, corrupt or incompatible checkpoint files.
class CheckpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace satforge
