#pragma once

#include <stdexcept>
#include <string>

namespace exactbn {

/// Base class for recoverable failures reported by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Problem size beyond the supported envelope (more than 32 variables,
/// value keys wider than the table engine supports).
class LimitError : public Error {
 public:
  using Error::Error;
};

/// Score cache or shard file that cannot be read or combined.
class CacheError : public Error {
 public:
  using Error::Error;
};

/// Allocation failure while building tables.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace exactbn
