#include "sfp/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "sfp/rng.hpp"

namespace sfp {

static void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidInputError("lambda must be a positive real");
}

MixedProfile fp_step(const PotentialGame& game, double lambda,
                     const MixedProfile& x, std::int64_t n,
                     std::uint64_t seed) {
  check_lambda(lambda);
  validate_profile(game, x);
  if (n < 0) throw InvalidInputError("step index must be nonnegative");
  const int players = game.num_players();
  const MixedProfile p =
      detail::smoothed_best_response_unchecked(game, lambda, x);
  MixedProfile next(players);
  const double weight = 1.0 / static_cast<double>(n + 1);
  for (int i = 0; i < players; ++i) {
    const double indicator =
        rng::uniform(seed, static_cast<std::uint64_t>(n) + 1, i) < p[i] ? 1.0
                                                                        : 0.0;
    next[i] = x[i] + weight * (indicator - x[i]);
  }
  return next;
}

Trajectory smooth_fp_run(const PotentialGame& game, double lambda,
                         std::int64_t steps, std::uint64_t seed,
                         const std::optional<std::vector<int>>& init_actions,
                         std::int64_t thinning) {
  check_lambda(lambda);
  if (steps < 1) throw InvalidInputError("steps must be at least 1");
  if (thinning < 1) throw InvalidInputError("thinning must be at least 1");
  const int n = game.num_players();

  MixedProfile x(n);
  if (init_actions) {
    if (static_cast<int>(init_actions->size()) != n)
      throw InvalidInputError("init action profile has wrong length");
    for (int i = 0; i < n; ++i) {
      if ((*init_actions)[i] != 1 && (*init_actions)[i] != 2)
        throw InvalidInputError("init actions must be 1 or 2");
      x[i] = (*init_actions)[i] == 1 ? 1.0 : 0.0;
    }
  } else {
    // Initial action counter is step 0; subsequent rounds use steps 1..N.
    for (int i = 0; i < n; ++i) x[i] = rng::uniform(seed, 0, i) < 0.5 ? 1.0 : 0.0;
  }

  Trajectory traj;
  traj.kind = Trajectory::Kind::Stochastic;
  traj.lambda = lambda;
  traj.seed = seed;
  traj.step_rule = "harmonic 1/(n+1)";
  traj.times.push_back(0.0);
  traj.states.push_back(x);
  for (std::int64_t step = 0; step < steps; ++step) {
    x = fp_step(game, lambda, x, step, seed);
    if ((step + 1) % thinning == 0 || step + 1 == steps) {
      traj.times.push_back(static_cast<double>(step + 1));
      traj.states.push_back(x);
    }
  }
  return traj;
}

Trajectory br_flow(const PotentialGame& game, double lambda,
                   const MixedProfile& x0, double horizon, double h) {
  check_lambda(lambda);
  validate_profile(game, x0);
  if (!(h > 0.0) || h > 0.1)
    throw InvalidInputError("step size must satisfy 0 < h <= 0.1");
  if (!(horizon >= h)) throw InvalidInputError("horizon must be at least h");

  const auto f = [&](const MixedProfile& x) -> MixedProfile {
    return detail::smoothed_best_response_unchecked(game, lambda, x) - x;
  };

  Trajectory traj;
  traj.kind = Trajectory::Kind::Flow;
  traj.lambda = lambda;
  traj.step_rule = "rk4 h=" + std::to_string(h);
  traj.times.push_back(0.0);
  traj.states.push_back(x0);

  const std::int64_t full_steps =
      static_cast<std::int64_t>(std::floor(horizon / h + 1e-12));
  const double leftover = horizon - static_cast<double>(full_steps) * h;
  MixedProfile x = x0;
  double t = 0.0;
  const std::int64_t total = full_steps + (leftover > 1e-12 ? 1 : 0);
  for (std::int64_t k = 0; k < total; ++k) {
    const double step = (k < full_steps) ? h : leftover;
    const MixedProfile k1 = f(x);
    const MixedProfile k2 = f(x + (step / 2.0) * k1);
    const MixedProfile k3 = f(x + (step / 2.0) * k2);
    const MixedProfile k4 = f(x + step * k3);
    x += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], 0.0, 1.0);
    if (!x.allFinite())
      throw IntegrationFailure("flow state became non-finite at t=" +
                               std::to_string(t + step));
    t += step;
    traj.times.push_back(t);
    traj.states.push_back(x);
  }
  return traj;
}

RunResult classify_run(const Trajectory& traj,
                       const std::vector<NashDistribution>& nds,
                       double tail_fraction, double pure_tol) {
  if (traj.states.empty()) throw InvalidInputError("empty trajectory");
  if (nds.empty()) throw InvalidInputError("no Nash distributions supplied");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw InvalidInputError("tail_fraction must lie in (0,1]");
  if (!(pure_tol > 0.0)) throw InvalidInputError("pure_tol must be positive");

  RunResult out;
  const MixedProfile& terminal = traj.terminal();
  out.nearest_nd_distance = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < nds.size(); ++k) {
    const double d = sup_distance(terminal, nds[k].point);
    if (d < out.nearest_nd_distance) {
      out.nearest_nd_distance = d;
      out.nearest_nd = static_cast<int>(k);
    }
  }

  MixedProfile vertex(terminal.size());
  for (Eigen::Index i = 0; i < terminal.size(); ++i)
    vertex[i] = terminal[i] >= 0.5 ? 1.0 : 0.0;
  const std::size_t count = traj.states.size();
  const std::size_t tail = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(tail_fraction * count)));
  out.converged_pure = true;
  for (std::size_t k = count - tail; k < count; ++k)
    if (sup_distance(traj.states[k], vertex) > pure_tol)
      out.converged_pure = false;
  return out;
}

static double entropy_term(double p) {
  const auto xlogx = [](double v) { return v > 0.0 ? v * std::log(v) : 0.0; };
  return -xlogx(p) - xlogx(1.0 - p);
}

double perturbed_potential(const PotentialGame& game, double lambda,
                           const MixedProfile& x) {
  check_lambda(lambda);
  validate_profile(game, x);
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) entropy += entropy_term(x[i]);
  return detail::expected_potential_unchecked(game, x) + lambda * entropy;
}

}  // namespace sfp
