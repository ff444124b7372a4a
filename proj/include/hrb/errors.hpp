#pragma once

#include <stdexcept>
#include <string>

namespace hrb {

/// Invalid configuration or malformed user input. CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: non-contractive operator, indefinite matrix,
/// degenerate spectrum where a quantity is undefined. CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem or serialization failure. CLI exit code 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hrb
