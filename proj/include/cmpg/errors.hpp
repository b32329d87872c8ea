#pragma once

#include <stdexcept>
#include <string>

namespace cmpg {

// Shapes of two objects disagree (policy vs game, stage table vs model, ...).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A model or policy violates one of its invariants (stochasticity, ranges).
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Empty constrained set: an LP without feasible point, a game whose minimum
// cost exceeds its threshold, or an infeasible policy handed to verify_nash.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure inside a solver (residual check, iteration limit).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cmpg
