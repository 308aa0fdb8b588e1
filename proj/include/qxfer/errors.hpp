#pragma once

#include <stdexcept>
#include <string>

namespace qxfer {

/// Malformed user input: bad flags, unreadable or invalid model files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation finished but could not produce the requested quantity,
/// e.g. a decay target that is never reached on the time grid.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qxfer
