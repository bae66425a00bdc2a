#include "sfp/response.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfp/stability.hpp"

namespace sfp {

const char* to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::Stable: return "stable";
    case StabilityClass::Unstable: return "unstable";
    case StabilityClass::NonHyperbolic: return "non-hyperbolic";
    default: return "unclassified";
  }
}

double sup_distance(const MixedProfile& a, const MixedProfile& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

double logistic(double t) {
  t = std::clamp(t, -500.0, 500.0);
  double p;
  if (t >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-t));
  } else {
    const double e = std::exp(t);
    p = e / (1.0 + e);
  }
  // Keep the softmax range contract strict even where exp saturates.
  p = std::min(p, std::nextafter(1.0, 0.0));
  p = std::max(p, std::numeric_limits<double>::min());
  return p;
}

static void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidInputError("lambda must be a positive real");
}

double smoothed_best_response_i(const PotentialGame& game, double lambda,
                                const MixedProfile& x, int player) {
  check_lambda(lambda);
  validate_profile(game, x);
  if (player < 0 || player >= game.num_players())
    throw InvalidInputError("player index out of range");
  return logistic(detail::pinned_difference_unchecked(game, player, x) /
                  lambda);
}

MixedProfile smoothed_best_response(const PotentialGame& game, double lambda,
                                    const MixedProfile& x) {
  check_lambda(lambda);
  validate_profile(game, x);
  return detail::smoothed_best_response_unchecked(game, lambda, x);
}

namespace detail {

MixedProfile smoothed_best_response_unchecked(const PotentialGame& game,
                                              double lambda,
                                              const MixedProfile& x) {
  const int n = game.num_players();
  if (x.size() != n) throw InvalidInputError("profile dimension mismatch");
  MixedProfile out(n);
  for (int i = 0; i < n; ++i)
    out[i] = logistic(pinned_difference_unchecked(game, i, x) / lambda);
  return out;
}

// Clamp into the open cube; the boundary itself is never a response value.
void clamp_interior(MixedProfile& x) {
  const double hi = std::nextafter(1.0, 0.0);
  const double lo = std::numeric_limits<double>::min();
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x[i] = std::clamp(x[i], lo, hi);
}

bool newton_refine(const PotentialGame& game, double lambda, MixedProfile& x,
                   double tol, int max_iters) {
  double res =
      (smoothed_best_response_unchecked(game, lambda, x) - x).cwiseAbs().maxCoeff();
  for (int it = 0; it < max_iters; ++it) {
    if (res <= tol) return true;
    const MixedProfile f =
        smoothed_best_response_unchecked(game, lambda, x) - x;
    const Eigen::MatrixXd df = jacobian(game, lambda, x);
    const Eigen::VectorXd step = df.partialPivLu().solve(-f);
    if (!step.allFinite()) return false;
    // Backtracking on the sup-norm residual; the response is stiff for
    // small lambda and full steps overshoot the transition region.
    double t = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt) {
      MixedProfile trial = x + t * step;
      clamp_interior(trial);
      const double trial_res =
          (smoothed_best_response_unchecked(game, lambda, trial) - trial)
              .cwiseAbs()
              .maxCoeff();
      if (trial_res < res || trial_res <= tol) {
        x = trial;
        res = trial_res;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) return false;  // stuck in a residual basin
  }
  return res <= tol;
}

}  // namespace detail

static int auto_grid_density(int n) {
  if (n <= 4) return 5;
  if (n <= 8) return 2;
  return 0;
}

std::vector<NashDistribution> solve_nash_distributions(
    const PotentialGame& game, double lambda, const SolverOptions& opts) {
  check_lambda(lambda);
  const int n = game.num_players();

  std::vector<MixedProfile> starts;
  const double inset = opts.vertex_inset;
  for (std::uint32_t v = 0; v < game.num_profiles(); ++v) {
    MixedProfile x(n);
    for (int i = 0; i < n; ++i)
      x[i] = ((v >> i) & 1u) ? inset : 1.0 - inset;
    starts.push_back(std::move(x));
  }
  const int g = opts.grid_density >= 0 ? opts.grid_density
                                       : auto_grid_density(n);
  if (g > 0) {
    std::vector<int> idx(n, 0);
    while (true) {
      MixedProfile x(n);
      for (int i = 0; i < n; ++i) x[i] = (idx[i] + 0.5) / g;
      starts.push_back(std::move(x));
      int c = 0;
      while (c < n && ++idx[c] == g) idx[c++] = 0;
      if (c == n) break;
    }
  }
  for (const MixedProfile& x : opts.extra_starts) {
    if (x.size() != n) throw InvalidInputError("extra start dimension mismatch");
    MixedProfile interior = x;
    detail::clamp_interior(interior);
    starts.push_back(std::move(interior));
  }

  std::vector<MixedProfile> found;
  for (const MixedProfile& start : starts) {
    // Newton straight from the start first: the damped warmup is repelled
    // by unstable fixed points, which would lose the mixed-branch roots
    // that caller-supplied starts are meant to reach.
    MixedProfile x = start;
    bool ok = detail::newton_refine(game, lambda, x, opts.tolerance,
                                    opts.newton_max_iters);
    if (!ok) {
      x = start;
      for (int it = 0; it < opts.damped_steps; ++it) {
        const MixedProfile br =
            detail::smoothed_best_response_unchecked(game, lambda, x);
        x = (1.0 - opts.damping) * x + opts.damping * br;
      }
      ok = detail::newton_refine(game, lambda, x, opts.tolerance,
                                 opts.newton_max_iters);
    }
    if (!ok) continue;  // non-convergent start, silently dropped
    // Polish toward machine precision; identities checked at fixed points
    // (b = x) degrade linearly in residual/lambda.
    MixedProfile polished = x;
    detail::newton_refine(game, lambda, polished, 1e-15, 3);
    const auto residual_of = [&](const MixedProfile& p) {
      return (detail::smoothed_best_response_unchecked(game, lambda, p) - p)
          .cwiseAbs()
          .maxCoeff();
    };
    if (residual_of(polished) < residual_of(x)) x = polished;
    found.push_back(x);
  }

  // Deterministic order regardless of start order: sort, then merge within
  // the dedup radius.
  std::sort(found.begin(), found.end(),
            [](const MixedProfile& a, const MixedProfile& b) {
              return std::lexicographical_compare(a.data(), a.data() + a.size(),
                                                  b.data(), b.data() + b.size());
            });
  std::vector<NashDistribution> out;
  for (const MixedProfile& x : found) {
    bool dup = false;
    for (const NashDistribution& nd : out)
      if (sup_distance(nd.point, x) <= opts.dedup_radius) { dup = true; break; }
    if (dup) continue;
    NashDistribution nd;
    nd.point = x;
    nd.lambda = lambda;
    nd.residual =
        (detail::smoothed_best_response_unchecked(game, lambda, x) - x)
            .cwiseAbs()
            .maxCoeff();
    out.push_back(std::move(nd));
  }
  if (out.empty())
    throw NoFixedPointError(
        "no fixed point converged; a fixed point always exists, so the "
        "start set or tolerances are defective");
  if (opts.classify) {
    for (NashDistribution& nd : out)
      nd.classification = classify_rest_point(game, lambda, nd.point).label();
  }
  return out;
}

std::vector<double> default_lambda_schedule(double from, double ratio,
                                            double floor) {
  if (!(from > 0.0) || !(floor > 0.0) || !(ratio > 0.0 && ratio < 1.0))
    throw InvalidInputError("schedule requires from, floor > 0 and ratio in (0,1)");
  std::vector<double> schedule;
  double lam = from;
  while (lam > floor * (1.0 + 1e-12)) {
    schedule.push_back(lam);
    lam *= ratio;
  }
  schedule.push_back(floor);
  return schedule;
}

ContinuationPath continue_to_ne(const PotentialGame& game,
                                const NashDistribution& nd,
                                const std::vector<double>& schedule,
                                const SolverOptions& opts) {
  if (schedule.empty()) throw InvalidInputError("empty lambda schedule");
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (!(schedule[k] > 0.0))
      throw InvalidInputError("schedule lambdas must be positive");
    if (k > 0 && !(schedule[k] < schedule[k - 1]))
      throw InvalidInputError("schedule must be strictly decreasing");
  }
  if (std::abs(schedule.front() - nd.lambda) >
      1e-9 * std::max(1.0, nd.lambda))
    throw InvalidInputError("schedule head must equal the ND's lambda");

  ContinuationPath path;
  MixedProfile x = nd.point;
  double last_good = nd.lambda;
  for (double lam : schedule) {
    const MixedProfile predictor = x;
    if (!detail::newton_refine(game, lam, x, opts.tolerance,
                               opts.newton_max_iters))
      throw ContinuationFailure(
          "corrector failed to converge at lambda=" + std::to_string(lam) +
          "; branch lost (non-hyperbolic point or too-aggressive schedule)",
          last_good);
    if (sup_distance(x, predictor) > opts.max_branch_step)
      throw ContinuationFailure(
          "corrector moved " + std::to_string(sup_distance(x, predictor)) +
          " at lambda=" + std::to_string(lam) +
          ", beyond the branch step bound; schedule too aggressive",
          last_good);
    NashDistribution node;
    node.point = x;
    node.lambda = lam;
    node.residual =
        (detail::smoothed_best_response_unchecked(game, lam, x) - x)
            .cwiseAbs()
            .maxCoeff();
    node.classification = classify_rest_point(game, lam, x).label();
    path.nodes.emplace_back(lam, std::move(node));
    last_good = lam;
  }

  path.terminal_ne = x;
  for (Eigen::Index i = 0; i < path.terminal_ne.size(); ++i) {
    if (std::abs(path.terminal_ne[i]) <= opts.snap_tolerance)
      path.terminal_ne[i] = 0.0;
    else if (std::abs(path.terminal_ne[i] - 1.0) <= opts.snap_tolerance)
      path.terminal_ne[i] = 1.0;
  }
  return path;
}

bool is_pure_strategy_nd(const ContinuationPath& path) {
  if (path.nodes.empty()) throw InvalidInputError("empty continuation path");
  for (Eigen::Index i = 0; i < path.terminal_ne.size(); ++i)
    if (path.terminal_ne[i] != 0.0 && path.terminal_ne[i] != 1.0) return false;
  return true;
}

}  // namespace sfp
