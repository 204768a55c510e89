#pragma once

#include <stdexcept>
#include <string>

namespace gradbench {

// Thrown for malformed configuration: bad dimensions, out-of-range
// hyperparameters, unknown names, policies that need examples on an
// objective that has none. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a computation produces or receives a non-finite value.
// Maps to CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown for filesystem failures (unreadable config, unwritable output).
// Maps to CLI exit code 4.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown for command-line misuse not caught by the parser itself.
// Maps to CLI exit code 2.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gradbench
