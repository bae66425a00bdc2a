#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "sfp/game.hpp"

namespace sfp {

enum class StabilityClass { Unclassified, Stable, Unstable, NonHyperbolic };
const char* to_string(StabilityClass c);

// Numerically stable logistic. The argument is clamped to [-500, 500] and
// the result is kept strictly inside (0, 1) even when the exponential
// saturates in double precision.
double logistic(double t);

// Logit response of player i: sigma((U(a_i^1,x_{-i}) - U(a_i^2,x_{-i})) / lambda).
double smoothed_best_response_i(const PotentialGame& game, double lambda,
                                const MixedProfile& x, int player);

// Joint logit response; always strictly interior.
MixedProfile smoothed_best_response(const PotentialGame& game, double lambda,
                                    const MixedProfile& x);

// Fixed point of the joint smoothed response at a given lambda.
struct NashDistribution {
  MixedProfile point;
  double lambda = 0.0;
  double residual = 0.0;  // ||x - BR(x)||_inf at the reported point
  StabilityClass classification = StabilityClass::Unclassified;
  std::optional<MixedProfile> continued_ne;  // lambda -> 0 limit, when known
};

struct SolverOptions {
  double tolerance = 1e-12;    // accepted fixed-point residual, sup norm
  double damping = 0.5;        // relaxation factor of the warmup iteration
  int damped_steps = 200;
  int newton_max_iters = 50;
  double vertex_inset = 1e-3;  // vertex starts pushed inside the cube
  int grid_density = -1;       // starts per axis; -1 auto: 5 (N<=4), 2 (N<=8), 0
  double dedup_radius = 1e-6;  // sup-norm radius for merging solutions
  std::vector<MixedProfile> extra_starts;
  bool classify = true;        // fill stability classification on results
  // Continuation defaults (geometric schedule down to the floor).
  double schedule_ratio = 0.7;
  double schedule_floor = 1e-4;
  double snap_tolerance = 1e-3;   // vertex snap at the terminal lambda
  double max_branch_step = 0.2;   // corrector move per node; larger means the
                                  // branch was lost (jump to another root)
};

// Multi-start search for ND(lambda): damped fixed-point iteration from
// inset vertices, an interior grid and any caller-supplied starts, then
// Newton refinement on F(x) = BR(x) - x with the analytic Jacobian.
// Results are deduplicated and sorted lexicographically, so the output does
// not depend on start order. Throws NoFixedPointError on an empty result.
std::vector<NashDistribution> solve_nash_distributions(
    const PotentialGame& game, double lambda, const SolverOptions& opts = {});

// Fixed-point branch tracked over a decreasing lambda schedule.
struct ContinuationPath {
  std::vector<std::pair<double, NashDistribution>> nodes;
  MixedProfile terminal_ne;
};

// Geometric schedule from `from` down to the floor (inclusive).
std::vector<double> default_lambda_schedule(double from, double ratio = 0.7,
                                            double floor = 1e-4);

// Tracks nd along the schedule (predictor: previous point; corrector:
// Newton). The terminal point has coordinates within snap_tolerance of the
// cube vertices snapped to {0,1}; other coordinates are kept as mixed
// components. Throws ContinuationFailure when the corrector diverges.
ContinuationPath continue_to_ne(const PotentialGame& game,
                                const NashDistribution& nd,
                                const std::vector<double>& schedule,
                                const SolverOptions& opts = {});

// True iff every coordinate of the path's terminal equilibrium is 0 or 1.
bool is_pure_strategy_nd(const ContinuationPath& path);

// Sup-norm distance helper used throughout.
double sup_distance(const MixedProfile& a, const MixedProfile& b);

namespace detail {
// BR without cube bounds checking (dimension still enforced); used on
// Runge-Kutta stage points and Newton probes that may sit marginally
// outside [0,1]^N, where the multilinear extension is still well defined.
MixedProfile smoothed_best_response_unchecked(const PotentialGame& game,
                                              double lambda,
                                              const MixedProfile& x);
// Newton on F(x) = BR(x) - x from x; returns true when the residual
// reaches tol. x is updated in place and kept strictly inside the cube.
bool newton_refine(const PotentialGame& game, double lambda, MixedProfile& x,
                   double tol, int max_iters);
// Pull coordinates into the open cube (boundary values become the nearest
// representable interior ones).
void clamp_interior(MixedProfile& x);
}  // namespace detail

}  // namespace sfp
