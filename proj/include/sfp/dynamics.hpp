#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sfp/game.hpp"
#include "sfp/response.hpp"

namespace sfp {

// Time-indexed sequence of mixed profiles, from a stochastic run or an ODE
// flow. Stochastic times are step indices; flow times are continuous.
struct Trajectory {
  enum class Kind { Stochastic, Flow };
  Kind kind = Kind::Stochastic;
  double lambda = 0.0;
  std::uint64_t seed = 0;  // stochastic runs only
  std::string step_rule;
  std::vector<double> times;
  std::vector<MixedProfile> states;
  const MixedProfile& terminal() const { return states.back(); }
};

// One transition of smooth fictitious play from state x at step n: each
// player independently draws its next action from the logit response to x,
// and the empirical distribution moves by 1/(n+1) toward the action
// indicator. Randomness comes from the per-(step, player) counter stream of
// `seed`, so the transition is a pure function of its arguments.
MixedProfile fp_step(const PotentialGame& game, double lambda,
                     const MixedProfile& x, std::int64_t n,
                     std::uint64_t seed);

// Smooth fictitious play for `steps` rounds. Initial actions come from
// `init_actions` (values 1 or 2 per player) or are drawn uniformly under
// the run seed; x(0) is their indicator profile. Every `thinning`-th state
// plus the final one is recorded. Bit-identical for identical arguments.
Trajectory smooth_fp_run(const PotentialGame& game, double lambda,
                         std::int64_t steps, std::uint64_t seed,
                         const std::optional<std::vector<int>>& init_actions = {},
                         std::int64_t thinning = 1);

// Fixed-step RK4 integration of dx/dt = BR(x) - x over [0, horizon].
// Accepted states are clamped to the cube (the flow itself is forward
// invariant; clamping only corrects rounding drift).
Trajectory br_flow(const PotentialGame& game, double lambda,
                   const MixedProfile& x0, double horizon, double h = 0.01);

struct RunResult {
  int nearest_nd = -1;            // index into the ND list handed in
  double nearest_nd_distance = 0;
  bool converged_pure = false;
};

// nearest_nd by sup-norm distance of the terminal state; converged_pure is
// true iff every sample in the trailing tail_fraction of the trajectory
// stays within pure_tol of one single cube vertex.
RunResult classify_run(const Trajectory& traj,
                       const std::vector<NashDistribution>& nds,
                       double tail_fraction = 0.1, double pure_tol = 0.1);

// U(x) + lambda * sum_i [ -x_i log x_i - (1-x_i) log(1-x_i) ]; the entropy
// perturbation of the expected potential, nondecreasing along br_flow.
double perturbed_potential(const PotentialGame& game, double lambda,
                           const MixedProfile& x);

}  // namespace sfp
