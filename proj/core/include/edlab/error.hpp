#pragma once

#include <stdexcept>
#include <string>

namespace edlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument or configuration value is out of range.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A physical or numerical invariant does not hold for a computed object.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// A state leaks into the grid boundary or the near-Nyquist momentum band.
class ConfinementError : public InvariantError {
 public:
  using InvariantError::InvariantError;
};

/// Malformed scenario configuration (unknown key, unparsable value).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace edlab
