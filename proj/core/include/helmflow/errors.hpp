#pragma once

#include <stdexcept>
#include <string>

namespace helmflow {

/// Malformed input text (case files, JSON networks).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Structurally invalid network or violated model precondition.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical failure inside a solver (singular system, non-convergence).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Approximant could not be built at the requested order.
struct ConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace helmflow
