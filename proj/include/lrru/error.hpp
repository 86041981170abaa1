#pragma once

#include <stdexcept>
#include <string>

namespace lrru {

// Error taxonomy. The CLI maps these onto exit codes:
// UsageError -> 1, DataError/DimensionError -> 2, NumericError -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public DataError {
 public:
  using DataError::DataError;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace lrru
