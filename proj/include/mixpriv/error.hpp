#pragma once

#include <stdexcept>
#include <string>

namespace mixpriv {

// Malformed or inconsistent input data: unreadable files, bad rows, rasters
// whose shapes do not agree. Parameter-range violations use
// std::invalid_argument instead.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public DataError {
 public:
  using DataError::DataError;
};

// A privacy gate could not be met for too many samples of an epoch.
class GateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mixpriv
