#pragma once

#include <stdexcept>
#include <string>

namespace sqmlab {

/// Bad argument or a violated precondition.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// An iterative solver ran out of iterations; carries the last residual.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), last_residual(residual), iterations_used(iterations) {}
  double last_residual;
  int iterations_used;
};

/// The computation ran but its output cannot be trusted (oscillating
/// residual, scaling window too narrow, ...).
class DiagnosticError : public std::runtime_error {
 public:
  explicit DiagnosticError(const std::string& what) : std::runtime_error(what) {}
};

/// A stochastic path produced a non-finite value; names path and step.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, std::size_t path, std::size_t step)
      : std::runtime_error(what), path_index(path), step_index(step) {}
  std::size_t path_index;
  std::size_t step_index;
};

}  // namespace sqmlab
