#pragma once

#include <stdexcept>
#include <string>

namespace rcl {

/// Computation would exceed an explicit cost guard (CLI exit code 3).
struct GuardError : std::runtime_error {
  explicit GuardError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or incomplete run configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem failure while reading configs or writing results (CLI exit code 4).
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rcl
