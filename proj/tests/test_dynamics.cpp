#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "sfp/dynamics.hpp"
#include "sfp/harness.hpp"

using namespace sfp;

TEST_CASE("empirical states live on the m/n grid") {
  const PotentialGame game = generate_game(3, 55);
  const Trajectory traj = smooth_fp_run(game, 0.2, 200, 99);
  REQUIRE(traj.states.size() == 201);
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    const double n = traj.times[k];
    for (int i = 0; i < 3; ++i) {
      const double scaled = traj.states[k][i] * n;
      CHECK(std::abs(scaled - std::round(scaled)) <= 1e-9);
    }
    CHECK(traj.times[k] > traj.times[k - 1]);
  }
  for (const auto& x : traj.states)
    for (int i = 0; i < 3; ++i) {
      CHECK(x[i] >= 0.0);
      CHECK(x[i] <= 1.0);
    }
}

TEST_CASE("identical arguments give bit-identical trajectories") {
  const PotentialGame game = generate_game(4, 77);
  const Trajectory a = smooth_fp_run(game, 0.1, 5000, 1234);
  const Trajectory b = smooth_fp_run(game, 0.1, 5000, 1234);
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k)
    CHECK((a.states[k] - b.states[k]).cwiseAbs().maxCoeff() == 0.0);

  const Trajectory c = smooth_fp_run(game, 0.1, 5000, 1235);
  bool differs = false;
  for (std::size_t k = 0; k < a.states.size() && !differs; ++k)
    if ((a.states[k] - c.states[k]).cwiseAbs().maxCoeff() != 0.0) differs = true;
  CHECK(differs);
}

TEST_CASE("initial actions seed the state and thinning keeps the final point") {
  const PotentialGame game = generate_game(2, 5);
  const std::vector<int> init{1, 2};
  const Trajectory traj = smooth_fp_run(game, 0.5, 1003, 7, init, 100);
  CHECK(traj.states.front()[0] == 1.0);
  CHECK(traj.states.front()[1] == 0.0);
  CHECK(traj.times.back() == 1003.0);
  // samples: n=0, 100, ..., 1000, plus the final 1003
  CHECK(traj.states.size() == 12);

  CHECK_THROWS_AS(smooth_fp_run(game, 0.5, 10, 7, std::vector<int>{1}),
                  InvalidInputError);
  CHECK_THROWS_AS(smooth_fp_run(game, 0.5, 10, 7, std::vector<int>{1, 3}),
                  InvalidInputError);
  CHECK_THROWS_AS(smooth_fp_run(game, 0.5, 0, 7), InvalidInputError);
}

TEST_CASE("single-player play concentrates on the better action") {
  const PotentialGame game(1, {1.0, 0.0});
  const double target = logistic(1.0 / 0.05);
  int good = 0;
  for (int s = 0; s < 100; ++s) {
    const Trajectory traj = smooth_fp_run(game, 0.05, 10000, 9000 + s,
                                          std::nullopt, 10000);
    if (std::abs(traj.terminal()[0] - target) <= 0.05) ++good;
  }
  CHECK(good >= 99);
}

TEST_CASE("mean one-step drift matches the flow field") {
  const PotentialGame game = generate_game(3, 321);
  const MixedProfile x = oracles::random_profile(3, 322);
  const double lambda = 0.2;
  const std::int64_t n = 9;
  const int reps = 10000;

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(3);
  for (int r = 0; r < reps; ++r) {
    const MixedProfile next = fp_step(game, lambda, x, n, rng::split(55, r));
    const Eigen::VectorXd delta = next - x;
    sum += delta;
    sumsq += delta.cwiseProduct(delta);
  }
  const Eigen::VectorXd mean = sum / reps;
  const Eigen::VectorXd expected =
      (smoothed_best_response(game, lambda, x) - x) / static_cast<double>(n + 1);
  for (int i = 0; i < 3; ++i) {
    const double var = sumsq[i] / reps - mean[i] * mean[i];
    const double se = std::sqrt(std::max(var, 1e-30) / reps);
    CHECK(std::abs(mean[i] - expected[i]) <= 3.0 * se);
  }
}

TEST_CASE("flow holds its rest points and reaches the stable branch") {
  const PotentialGame game = oracles::coordination_game();
  const auto nds = solve_nash_distributions(game, 0.2);
  REQUIRE(nds.size() == 3);

  for (const auto& nd : nds) {
    const Trajectory traj = br_flow(game, 0.2, nd.point, 10.0, 0.01);
    CHECK(sup_distance(traj.terminal(), nd.point) <= 1e-8);
  }

  MixedProfile x0(2);
  x0 << 0.9, 0.9;
  const Trajectory traj = br_flow(game, 0.2, x0, 50.0, 0.01);
  const double t = oracles::coordination_outer_t(0.2);
  CHECK(std::abs(traj.terminal()[0] - t) <= 1e-6);
  CHECK(std::abs(traj.terminal()[1] - t) <= 1e-6);
  for (const auto& x : traj.states)
    for (int i = 0; i < 2; ++i) {
      CHECK(x[i] >= 0.0);
      CHECK(x[i] <= 1.0);
    }

  CHECK_THROWS_AS(br_flow(game, 0.2, x0, 50.0, 0.2), InvalidInputError);
  CHECK_THROWS_AS(br_flow(game, 0.2, x0, 0.001, 0.01), InvalidInputError);
}

TEST_CASE("RK4 converges at fourth order on the coordination flow") {
  const PotentialGame game = oracles::coordination_game();
  MixedProfile x0(2);
  x0 << 0.9, 0.7;
  const double horizon = 2.0;
  const MixedProfile xa = br_flow(game, 0.2, x0, horizon, 0.02).terminal();
  const MixedProfile xb = br_flow(game, 0.2, x0, horizon, 0.01).terminal();
  const MixedProfile xc = br_flow(game, 0.2, x0, horizon, 0.005).terminal();
  const double coarse = sup_distance(xa, xb);
  const double fine = sup_distance(xb, xc);
  REQUIRE(fine > 0.0);
  const double ratio = coarse / fine;
  CHECK(ratio >= 8.0);
  CHECK(ratio <= 32.0);
}

TEST_CASE("flow output is reproducible bitwise") {
  const PotentialGame game = generate_game(3, 808);
  const MixedProfile x0 = oracles::random_profile(3, 809);
  const Trajectory a = br_flow(game, 0.1, x0, 5.0, 0.01);
  const Trajectory b = br_flow(game, 0.1, x0, 5.0, 0.01);
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k)
    CHECK((a.states[k] - b.states[k]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("perturbed potential is nondecreasing along flows") {
  for (int trial = 0; trial < 5; ++trial) {
    const PotentialGame game =
        trial == 0 ? oracles::coordination_game() : generate_game(3, 820 + trial);
    const double lambda = 0.1;
    const MixedProfile x0 =
        oracles::random_profile(game.num_players(), 830 + trial);
    const Trajectory traj = br_flow(game, lambda, x0, 30.0, 0.01);
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& x : traj.states) {
      const double v = perturbed_potential(game, lambda, x);
      CHECK(v >= prev - 1e-8);
      prev = v;
    }
  }
}

TEST_CASE("flows land on solved Nash distributions") {
  int checked = 0;
  for (int g = 0; g < 4; ++g) {
    const PotentialGame game = generate_game(3, 840 + g);
    if (!audit_regularity(game).game_regular) continue;
    const auto nds = solve_nash_distributions(game, 0.1);
    for (int s = 0; s < 5; ++s) {
      const MixedProfile x0 = oracles::random_profile(3, 900 + 10 * g + s);
      const Trajectory traj = br_flow(game, 0.1, x0, 200.0, 0.01);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& nd : nds)
        best = std::min(best, sup_distance(traj.terminal(), nd.point));
      CHECK(best <= 1e-6);
      ++checked;
    }
  }
  CHECK(checked >= 10);
}

TEST_CASE("run classification: vertices, mixed points, tail windows") {
  const PotentialGame game = oracles::coordination_game();
  const auto nds = solve_nash_distributions(game, 0.2);

  Trajectory constant;
  constant.lambda = 0.2;
  MixedProfile ones(2);
  ones << 1.0, 1.0;
  for (int k = 0; k < 10; ++k) {
    constant.times.push_back(k);
    constant.states.push_back(ones);
  }
  RunResult rr = classify_run(constant, nds, 0.1, 1e-6);
  CHECK(rr.converged_pure);
  CHECK(rr.nearest_nd == 2);

  Trajectory center = constant;
  MixedProfile half(2);
  half << 0.5, 0.5;
  for (auto& x : center.states) x = half;
  rr = classify_run(center, nds, 0.1, 0.1);
  CHECK_FALSE(rr.converged_pure);
  CHECK(rr.nearest_nd == 1);
  CHECK(rr.nearest_nd_distance <= 1e-12);

  // A late excursion inside the tail window spoils convergence.
  Trajectory spoiled = constant;
  spoiled.states.back() = half;
  rr = classify_run(spoiled, nds, 0.5, 0.1);
  CHECK_FALSE(rr.converged_pure);

  CHECK_THROWS_AS(classify_run(Trajectory{}, nds), InvalidInputError);
  CHECK_THROWS_AS(classify_run(constant, {}), InvalidInputError);
  CHECK_THROWS_AS(classify_run(constant, nds, 0.0, 0.1), InvalidInputError);
}
