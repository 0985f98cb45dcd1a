#pragma once

#include <stdexcept>
#include <string>

namespace memkern {

/// Raised when the data make a numerical problem degenerate or unsolvable
/// (vanishing measurement at t = 0, vanishing solvability denominator, ...).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by the scenario loader for malformed or incomplete configurations.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace memkern
