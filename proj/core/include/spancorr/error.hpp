#pragma once

#include <stdexcept>
#include <string>

namespace spancorr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or usage (bad flags, inconsistent settings).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A searched-for substring or id does not exist.
class NotFound : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace spancorr
