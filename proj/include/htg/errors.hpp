#pragma once

#include <stdexcept>
#include <string>

namespace htg {

// Invalid or inconsistent configuration input; the CLI maps this to exit 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Iterative solver failed to converge; the CLI maps this to exit 3.
struct SolverError : std::runtime_error {
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), last_residual(residual) {}
  double last_residual;
};

}  // namespace htg
