#pragma once

#include <stdexcept>
#include <string>

namespace sphcp {

/// Bad configuration or malformed input file (CLI exit code 2).
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: non-convergence, non-finite values (CLI exit code 3).
struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A block factorization failed; signals a degenerate grid/degree combination.
struct singular_operator_error : numerical_error {
  explicit singular_operator_error(const std::string& msg) : numerical_error(msg) {}
};

/// File I/O failure (CLI exit code 4).
struct io_error : std::runtime_error {
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sphcp
