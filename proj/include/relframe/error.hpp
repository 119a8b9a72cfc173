#pragma once

#include <stdexcept>

namespace relframe {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A point, speed or profile argument lies outside where the object is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

// An input violates an operation's precondition (non-unit velocity,
// non-isometric map, world line not an integral curve, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Newton iteration or step-halving acceptance failed.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace relframe
