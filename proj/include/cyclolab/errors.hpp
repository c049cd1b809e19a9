#pragma once

#include <stdexcept>
#include <string>

namespace cyclolab {

/// Caller passed arguments outside an operation's domain (n = 0, |z| >= 1, s <= 1, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A table or sum would exceed the configured memory or size ceiling.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Floating evaluation could not certify its result at the requested precision.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A cache file failed its magic, structure, or checksum validation.
class CacheInvalidError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cyclolab
