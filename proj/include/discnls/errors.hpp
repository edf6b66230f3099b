#pragma once

#include <stdexcept>
#include <string>

namespace discnls {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called outside its domain (bad index, bad parameter, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A cache file is missing its header, has the wrong version, or was written
/// for different parameters.
class CacheError : public Error {
 public:
  using Error::Error;
};

/// Time integration aborted (conservation drift above the configured threshold).
class FlowError : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling gave up after the attempt cap.
class SamplingError : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw PreconditionError(message);
}

}  // namespace discnls
