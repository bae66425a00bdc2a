#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "sfp/harness.hpp"
#include "sfp/response.hpp"

using namespace sfp;

TEST_CASE("logit response basics") {
  const PotentialGame game = oracles::coordination_game();
  MixedProfile x(2);
  x << 0.7, 0.5;  // opponent indifferent for player 1
  CHECK(smoothed_best_response_i(game, 1.0, x, 0) == doctest::Approx(0.5));

  x << 0.2, 1.0;
  // U1 - U2 = 1 against a committed opponent.
  CHECK(smoothed_best_response_i(game, 1.0, x, 0) ==
        doctest::Approx(0.7310585786300049).epsilon(1e-12));
  CHECK(std::abs(smoothed_best_response_i(game, 1e-6, x, 0) - 1.0) <= 1e-9);

  CHECK_THROWS_AS(smoothed_best_response_i(game, 0.0, x, 0),
                  InvalidInputError);
  CHECK_THROWS_AS(smoothed_best_response_i(game, -1.0, x, 0),
                  InvalidInputError);
  CHECK_THROWS_AS(smoothed_best_response_i(game, 1.0, x, 2),
                  InvalidInputError);
}

TEST_CASE("joint response stays strictly interior for extreme inputs") {
  const PotentialGame game(2, {1000.0, -1000.0, 1000.0, -1000.0});
  MixedProfile x(2);
  x << 1.0, 1.0;
  for (double lambda : {1e-9, 1e-3, 1.0, 1e6}) {
    const MixedProfile br = smoothed_best_response(game, lambda, x);
    for (int i = 0; i < 2; ++i) {
      CHECK(br[i] > 0.0);
      CHECK(br[i] < 1.0);
      CHECK(std::isfinite(br[i]));
    }
  }
}

TEST_CASE("logistic identity against the gradient") {
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 5;
    const PotentialGame game = generate_game(n, 40 + trial);
    const MixedProfile x = oracles::random_profile(n, 50 + trial, 0.0, 1.0);
    const double lambda = 0.05 + 0.5 * rng::uniform(60 + trial, 0);
    const Eigen::VectorXd grad = potential_gradient(game, x);
    const MixedProfile br = smoothed_best_response(game, lambda, x);
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(br[i] - logistic(grad[i] / lambda)) <= 1e-14);
  }
}

TEST_CASE("shift invariance and temperature scaling") {
  const PotentialGame game = generate_game(3, 91);
  std::vector<double> shifted = game.potential(), scaled = game.potential();
  const double c = 7.5, k = 3.0;
  for (double& v : shifted) v += c;
  for (double& v : scaled) v *= k;
  const PotentialGame game_shift(3, shifted);
  const PotentialGame game_scale(3, scaled);

  for (int trial = 0; trial < 20; ++trial) {
    const MixedProfile x = oracles::random_profile(3, 70 + trial, 0.0, 1.0);
    const double lambda = 0.1 + rng::uniform(80 + trial, 0);
    const MixedProfile a = smoothed_best_response(game, lambda, x);
    CHECK((smoothed_best_response(game_shift, lambda, x) - a)
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
    CHECK((smoothed_best_response(game_scale, lambda * k, x) - a)
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
  }
}

TEST_CASE("own coordinate never moves a player's response") {
  const PotentialGame game = generate_game(4, 13);
  MixedProfile x = oracles::random_profile(4, 14);
  const double before = smoothed_best_response_i(game, 0.3, x, 2);
  x[2] = 0.111;
  CHECK(smoothed_best_response_i(game, 0.3, x, 2) == before);  // bitwise
}

TEST_CASE("coordination fixed points match the scalar bisection oracle") {
  const PotentialGame game = oracles::coordination_game();

  const auto nds = solve_nash_distributions(game, 0.2);
  REQUIRE(nds.size() == 3);
  const double t = oracles::coordination_outer_t(0.2);
  CHECK(std::abs(nds[0].point[0] - (1.0 - t)) <= 1e-8);
  CHECK(std::abs(nds[0].point[1] - (1.0 - t)) <= 1e-8);
  CHECK(std::abs(nds[1].point[0] - 0.5) <= 1e-12);
  CHECK(std::abs(nds[2].point[0] - t) <= 1e-8);
  for (const auto& nd : nds) {
    CHECK(nd.residual <= 1e-10);
    CHECK((smoothed_best_response(game, 0.2, nd.point) - nd.point)
              .cwiseAbs()
              .maxCoeff() <= 1e-10);
    for (int i = 0; i < 2; ++i) {
      CHECK(nd.point[i] > 0.0);
      CHECK(nd.point[i] < 1.0);
    }
  }

  // Above lambda = 1/2 the scalar map is a contraction: one fixed point.
  const auto single = solve_nash_distributions(game, 10.0);
  REQUIRE(single.size() == 1);
  CHECK(sup_distance(single[0].point,
                     (MixedProfile(2) << 0.5, 0.5).finished()) <= 1e-10);

  CHECK_THROWS_AS(solve_nash_distributions(game, 0.0), InvalidInputError);
}

TEST_CASE("solver output is independent of extra-start order") {
  const PotentialGame game = generate_game(3, 333);
  SolverOptions a, b;
  a.extra_starts = {oracles::random_profile(3, 1), oracles::random_profile(3, 2)};
  b.extra_starts = {oracles::random_profile(3, 2), oracles::random_profile(3, 1)};
  const auto na = solve_nash_distributions(game, 0.15, a);
  const auto nb = solve_nash_distributions(game, 0.15, b);
  REQUIRE(na.size() == nb.size());
  for (std::size_t k = 0; k < na.size(); ++k)
    CHECK(sup_distance(na[k].point, nb[k].point) <= 1e-9);
}

TEST_CASE("continuation walks the coordination branches to their equilibria") {
  const PotentialGame game = oracles::coordination_game();
  const auto nds = solve_nash_distributions(game, 0.2);
  REQUIRE(nds.size() == 3);

  const auto schedule = default_lambda_schedule(0.2, 0.7, 1e-3);
  CHECK(schedule.front() == 0.2);
  CHECK(schedule.back() == 1e-3);

  // Upper stable branch ends at (1,1).
  const ContinuationPath up = continue_to_ne(game, nds[2], schedule);
  CHECK(up.terminal_ne[0] == 1.0);
  CHECK(up.terminal_ne[1] == 1.0);
  CHECK(is_pure_strategy_nd(up));

  // Symmetric branch is an exact fixed point at every lambda.
  const ContinuationPath mid = continue_to_ne(game, nds[1], schedule);
  CHECK(mid.terminal_ne[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(is_pure_strategy_nd(mid));

  // Distance to the terminal point is nonincreasing along the path.
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& [lam, node] : up.nodes) {
    const double d = sup_distance(node.point, up.terminal_ne);
    CHECK(d <= prev + 1e-12);
    CHECK(node.residual <= 1e-10);
    prev = d;
  }

  // Schedule validation.
  CHECK_THROWS_AS(continue_to_ne(game, nds[2], {0.2, 0.25}),
                  InvalidInputError);
  CHECK_THROWS_AS(continue_to_ne(game, nds[2], {0.1, 0.05}),
                  InvalidInputError);
  CHECK_THROWS_AS(continue_to_ne(game, nds[2], {}), InvalidInputError);
}

TEST_CASE("a lost branch raises a continuation failure with the last good lambda") {
  // Asymmetric coordination: the mixed branch moves fast in lambda, so a
  // single huge schedule jump throws the corrector onto another root,
  // which the branch step bound rejects.
  const PotentialGame game(2, {1.0, 0.0, 0.0, 2.0});
  const auto nds = solve_nash_distributions(game, 0.2);
  const NashDistribution* mixed = nullptr;
  for (const auto& nd : nds)
    if (nd.classification == StabilityClass::Unstable) mixed = &nd;
  REQUIRE(mixed != nullptr);
  try {
    continue_to_ne(game, *mixed, {0.2, 1e-6});
    FAIL("expected ContinuationFailure");
  } catch (const ContinuationFailure& e) {
    CHECK(e.last_good_lambda == 0.2);
  }
  // The default (gentle) schedule tracks the same branch fine.
  const ContinuationPath path =
      continue_to_ne(game, *mixed, default_lambda_schedule(0.2));
  CHECK_FALSE(is_pure_strategy_nd(path));
}

TEST_CASE("single-player continuation reaches the maximizer") {
  const PotentialGame game(1, {1.0, 0.0});
  const auto nds = solve_nash_distributions(game, 0.5);
  REQUIRE(nds.size() == 1);
  CHECK(nds[0].point[0] == doctest::Approx(logistic(1.0 / 0.5)).epsilon(1e-12));
  const ContinuationPath path =
      continue_to_ne(game, nds[0], default_lambda_schedule(0.5));
  CHECK(path.terminal_ne[0] == 1.0);
  CHECK(is_pure_strategy_nd(path));
}
