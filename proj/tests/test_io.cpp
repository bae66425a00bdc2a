#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "sfp/harness.hpp"
#include "sfp/io.hpp"

using namespace sfp;

namespace {
std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}
}  // namespace

TEST_CASE("game JSON round-trips exactly") {
  PotentialGame game = generate_game(4, 98765);
  game.name = "fixture";
  const auto path = temp_file("sfp_roundtrip.json");
  save_game(game, path);
  const PotentialGame loaded = load_game(path);
  CHECK(loaded.num_players() == game.num_players());
  CHECK(loaded.name == game.name);
  CHECK(loaded.seed == game.seed);
  for (std::size_t i = 0; i < game.potential().size(); ++i)
    CHECK(loaded.potential()[i] == game.potential()[i]);  // bitwise
  std::filesystem::remove(path);
}

TEST_CASE("schema violations produce descriptive parse errors") {
  const auto path = temp_file("sfp_bad.json");
  const auto write = [&](const std::string& text) {
    std::ofstream out(path);
    out << text;
  };

  write("{\"num_players\": 2, \"potential\": [1, 0, 0]}");
  CHECK_THROWS_WITH_AS(load_game(path),
                       doctest::Contains("must have 4 entries"), ParseError);

  write("{\"num_players\": 2, \"potential\": [1, null, 0, 1]}");
  CHECK_THROWS_WITH_AS(load_game(path), doctest::Contains("entry 1"),
                       ParseError);

  write("{\"potential\": [1, 0]}");
  CHECK_THROWS_AS(load_game(path), ParseError);

  write("{\"num_players\": 2, \"potential\": [1, 0, 0, 1]");  // truncated file
  CHECK_THROWS_AS(load_game(path), ParseError);

  write("[1, 2, 3]");
  CHECK_THROWS_AS(load_game(path), ParseError);

  write("{\"num_players\": 2}");
  CHECK_THROWS_AS(load_game(path), ParseError);

  CHECK_THROWS_AS(load_game(temp_file("sfp_missing_file.json")), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("trajectory CSV has the documented shape") {
  const PotentialGame game = generate_game(2, 10);
  const Trajectory traj = smooth_fp_run(game, 0.3, 10, 3, std::nullopt, 2);
  const auto path = temp_file("sfp_traj.csv");
  save_trajectory_csv(traj, path);

  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x_1,x_2");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == static_cast<int>(traj.states.size()));
  std::filesystem::remove(path);
}

TEST_CASE("solver options parse and reject unknown keys") {
  const json good{{"tolerance", 1e-10}, {"damping", 0.4}, {"grid_density", 3}};
  const SolverOptions opts = solver_options_from_json(good);
  CHECK(opts.tolerance == 1e-10);
  CHECK(opts.damping == 0.4);
  CHECK(opts.grid_density == 3);

  CHECK_THROWS_AS(solver_options_from_json(json{{"tol", 1e-10}}), ParseError);
  CHECK_THROWS_AS(solver_options_from_json(json{{"damping", "half"}}),
                  ParseError);
  CHECK_THROWS_AS(solver_options_from_json(json{{"damping", 0.0}}), ParseError);
}

TEST_CASE("experiment configs parse with defaults and validate") {
  const json j{{"players", 3},
               {"game_seed", 11},
               {"lambdas", json::array({0.1, 0.05})},
               {"runs", 10},
               {"steps", 1000}};
  const ExperimentConfig cfg = experiment_config_from_json(j);
  CHECK(cfg.generate_players == 3);
  CHECK(cfg.lambdas.size() == 2);
  CHECK(cfg.run_count == 10);
  CHECK(cfg.thinning == 100);

  CHECK_THROWS_AS(experiment_config_from_json(json{{"lambdas", json::array({0.1})}}),
                  ParseError);
  CHECK_THROWS_AS(experiment_config_from_json(json{{"players", 3}}), ParseError);
  CHECK_THROWS_AS(
      experiment_config_from_json(json{
          {"players", 3}, {"lambdas", json::array({0.1})}, {"runs", 0}}),
      ParseError);
}

TEST_CASE("report and ND JSON carry the documented fields") {
  const PotentialGame game = oracles::coordination_game();
  const json report = report_to_json(audit_regularity(game));
  CHECK(report["game_regular"] == true);
  CHECK(report["pure_ne"].size() == 2);
  CHECK(report["mixed_ne"][0]["pattern"] == "M,M");
  CHECK(report["mixed_ne"][0]["restricted_hessian_det"] == -4.0);
  CHECK(report["mixed_ne"][0]["quasi_strict_margin"].is_null());

  auto nds = solve_nash_distributions(game, 0.2);
  nds[2].continued_ne = (MixedProfile(2) << 1.0, 1.0).finished();
  const json arr = nash_distributions_to_json(nds);
  CHECK(arr.size() == 3);
  CHECK(arr[1]["classification"] == "unstable");
  CHECK(arr[2]["terminal_ne"][0] == 1.0);
  CHECK(arr[2]["lambda"] == 0.2);
}
