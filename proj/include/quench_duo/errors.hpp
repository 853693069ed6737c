#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace quench_duo {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument sits on a pole of a special function.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a documented precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Iterative method failed to converge or bracket (root finding, series).
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Closed-form expression degenerates (zero coupling, coincident energies).
/// Callers are expected to switch to the fallback path.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// A computed object failed one of its structural invariants.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration; `key()` names the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace quench_duo
