#pragma once

#include <stdexcept>
#include <string>

namespace mglfa {

/// Invalid input or configuration (bad sizes, missing seeds, unknown names).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical breakdown: singular systems, failed factorizations, divergence.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mglfa
