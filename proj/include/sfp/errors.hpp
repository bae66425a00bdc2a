#pragma once

#include <stdexcept>
#include <string>

namespace sfp {

// Caller-supplied value violates a precondition (dimension, range, index).
struct InvalidInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed or schema-violating file content.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Newton corrector diverged while tracking a fixed-point branch. Carries the
// last smoothing parameter at which the branch was still converged.
struct ContinuationFailure : std::runtime_error {
  ContinuationFailure(const std::string& what, double lambda)
      : std::runtime_error(what), last_good_lambda(lambda) {}
  double last_good_lambda;
};

// classify_rest_point was handed a point whose fixed-point residual exceeds
// the rest-point tolerance.
struct NotARestPointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Experiment gate: the game failed the regularity audit and the config did
// not ask to skip it.
struct AuditFailedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The multi-start search returned nothing. A fixed point always exists
// (the smoothed response is continuous on the cube), so this signals a
// solver defect rather than a property of the game.
struct NoFixedPointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The ODE integrator produced a non-finite state.
struct IntegrationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sfp
