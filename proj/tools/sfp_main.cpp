// Command-line front end: game generation, regularity audits, Nash
// distribution solves, smooth FP simulation, ODE flows, Monte Carlo
// experiments and lambda sweeps. Exit codes: 0 success, 2 validation
// errors, 3 audit failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "sfp/harness.hpp"

namespace {

using sfp::json;

struct GameFlags {
  std::string path;
  int players = 0;
  std::uint64_t seed = 0;
  std::string dist = "normal";
};

void add_game_flags(CLI::App* cmd, GameFlags& flags) {
  cmd->add_option("--game", flags.path, "game JSON file");
  cmd->add_option("--players", flags.players, "generate: number of players");
  cmd->add_option("--game-seed", flags.seed, "generate: seed");
  cmd->add_option("--dist", flags.dist, "generate: normal|uniform")
      ->check(CLI::IsMember({"normal", "uniform"}));
}

sfp::PotentialGame resolve_game(const GameFlags& flags) {
  if (!flags.path.empty()) return sfp::load_game(flags.path);
  if (flags.players <= 0)
    throw sfp::InvalidInputError(
        "provide --game <path> or --players/--game-seed generator flags");
  return sfp::generate_game(flags.players, flags.seed,
                            sfp::distribution_from_string(flags.dist));
}

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

std::vector<int> parse_ints(const std::string& csv) {
  std::vector<int> out;
  for (double v : parse_doubles(csv)) out.push_back(static_cast<int>(v));
  return out;
}

sfp::SolverOptions parse_solver(const std::string& arg) {
  if (arg.empty()) return {};
  json j;
  if (!arg.empty() && arg.front() == '{') {
    try {
      j = json::parse(arg);
    } catch (const json::exception& e) {
      throw sfp::ParseError(std::string("bad inline solver JSON: ") + e.what());
    }
  } else {
    std::ifstream in(arg);
    if (!in) throw sfp::ParseError("cannot open solver options file " + arg);
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw sfp::ParseError(std::string("bad solver JSON in ") + arg + ": " +
                            e.what());
    }
  }
  return sfp::solver_options_from_json(j);
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::ofstream out(out_path);
    if (!out) throw sfp::ParseError("cannot open " + out_path + " for writing");
    out << j.dump(2) << '\n';
  }
}

void print_report_table(const sfp::EquilibriumReport& report) {
  std::printf("pure NE: %zu   mixed NE: %zu   regular: %s\n",
              report.pure_ne.size(), report.mixed_ne.size(),
              report.game_regular ? "yes" : "no");
  auto line = [](const sfp::EquilibriumEntry& e) {
    std::string coords;
    for (Eigen::Index i = 0; i < e.point.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%s%.6g", i ? "," : "", e.point[i]);
      coords += buf;
    }
    std::printf("  (%s)  pattern=%s  margin=%.6g", coords.c_str(),
                sfp::pattern_to_string(e.pattern).c_str(),
                e.quasi_strict_margin);
    if (e.restricted_hessian_det)
      std::printf("  detH=%.6g", *e.restricted_hessian_det);
    std::printf("  %s\n", e.regular ? "regular" : "NOT regular");
  };
  for (const auto& e : report.pure_ne) line(e);
  for (const auto& e : report.mixed_ne) line(e);
  for (const auto& note : report.degeneracy_notes)
    std::printf("  degeneracy: %s\n", note.c_str());
}

int run(int argc, char** argv) {
  CLI::App app{"smooth fictitious play in N-player two-action potential games"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "write a random game");
  int gen_players = 3;
  std::uint64_t gen_seed = 0;
  std::string gen_dist = "normal", gen_name, gen_out;
  generate->add_option("--players", gen_players, "number of players")
      ->required();
  generate->add_option("--seed", gen_seed, "generator seed")->required();
  generate->add_option("--dist", gen_dist, "normal|uniform")
      ->check(CLI::IsMember({"normal", "uniform"}));
  generate->add_option("--name", gen_name, "metadata name");
  generate->add_option("--out", gen_out, "output path (default stdout)");

  // audit
  auto* audit = app.add_subcommand("audit", "regularity audit");
  GameFlags audit_game;
  add_game_flags(audit, audit_game);
  bool audit_json = false;
  std::string audit_out;
  audit->add_flag("--json", audit_json, "machine-readable output");
  audit->add_option("--out", audit_out, "output path (default stdout)");

  // nd
  auto* nd = app.add_subcommand("nd", "solve Nash distributions");
  GameFlags nd_game;
  add_game_flags(nd, nd_game);
  double nd_lambda = 0.1;
  bool nd_json = false, nd_continue = false;
  std::string nd_solver, nd_out;
  nd->add_option("--lambda", nd_lambda, "smoothing parameter")->required();
  nd->add_flag("--json", nd_json, "machine-readable output");
  nd->add_flag("--continue", nd_continue, "continue each ND to its equilibrium");
  nd->add_option("--solver", nd_solver, "solver options (inline JSON or file)");
  nd->add_option("--out", nd_out, "output path (default stdout)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run smooth fictitious play");
  GameFlags sim_game;
  add_game_flags(simulate, sim_game);
  double sim_lambda = 0.1;
  std::int64_t sim_steps = 100000, sim_thinning = 1;
  std::uint64_t sim_seed = 0;
  std::string sim_init, sim_out, sim_result_out;
  bool sim_classify = false;
  simulate->add_option("--lambda", sim_lambda)->required();
  simulate->add_option("--steps", sim_steps)->required();
  simulate->add_option("--seed", sim_seed, "run seed")->required();
  simulate->add_option("--init", sim_init,
                       "initial actions, e.g. 1,2,1 (default: random)");
  simulate->add_option("--thinning", sim_thinning, "record every k-th state");
  simulate->add_option("--out", sim_out, "trajectory CSV path");
  simulate->add_flag("--classify", sim_classify,
                     "also solve NDs and classify the run");
  simulate->add_option("--result-out", sim_result_out,
                       "run-result JSON path (default stdout)");

  // flow
  auto* flow = app.add_subcommand("flow", "integrate the best-response ODE");
  GameFlags flow_game;
  add_game_flags(flow, flow_game);
  double flow_lambda = 0.1, flow_horizon = 100.0, flow_h = 0.01;
  std::string flow_x0, flow_out;
  flow->add_option("--lambda", flow_lambda)->required();
  flow->add_option("--x0", flow_x0, "start point, e.g. 0.5,0.5")->required();
  flow->add_option("--horizon", flow_horizon)->required();
  flow->add_option("--step", flow_h, "RK4 step size");
  flow->add_option("--out", flow_out, "trajectory CSV path");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Monte Carlo experiment");
  GameFlags exp_game;
  add_game_flags(experiment, exp_game);
  std::string exp_config, exp_lambdas, exp_out, exp_runs_csv, exp_solver;
  int exp_runs = 200, exp_workers = 0;
  std::int64_t exp_steps = 100000, exp_thinning = 100;
  std::uint64_t exp_seed = 0;
  bool exp_skip_audit = false, exp_json = false;
  experiment->add_option("--config", exp_config, "config JSON file");
  experiment->add_option("--lambda", exp_lambdas, "comma-separated lambdas");
  experiment->add_option("--runs", exp_runs, "runs per lambda");
  experiment->add_option("--steps", exp_steps, "steps per run");
  experiment->add_option("--seed", exp_seed, "base seed");
  experiment->add_option("--thinning", exp_thinning);
  experiment->add_option("--workers", exp_workers,
                         "worker threads (default: SFP_WORKERS or hardware)");
  experiment->add_flag("--skip-audit", exp_skip_audit,
                       "run even if the game fails the regularity audit");
  experiment->add_option("--solver", exp_solver, "solver options JSON");
  experiment->add_option("--out", exp_out, "summary JSON path");
  experiment->add_option("--runs-csv", exp_runs_csv, "per-run CSV path");
  experiment->add_flag("--json", exp_json, "print summary JSON to stdout");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "lambda sweep pairing NDs to NEs");
  GameFlags sweep_game;
  add_game_flags(sweep, sweep_game);
  std::string sweep_lambdas, sweep_out;
  bool sweep_json = false;
  sweep->add_option("--lambdas", sweep_lambdas, "comma-separated lambdas")
      ->required();
  sweep->add_flag("--json", sweep_json, "machine-readable output");
  sweep->add_option("--out", sweep_out, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  if (generate->parsed()) {
    sfp::PotentialGame game = sfp::generate_game(
        gen_players, gen_seed, sfp::distribution_from_string(gen_dist));
    if (!gen_name.empty()) game.name = gen_name;
    if (gen_out.empty())
      std::cout << sfp::game_to_json(game).dump(2) << '\n';
    else
      sfp::save_game(game, gen_out);
    return 0;
  }

  if (audit->parsed()) {
    const sfp::PotentialGame game = resolve_game(audit_game);
    const sfp::EquilibriumReport report = sfp::audit_regularity(game);
    if (audit_json || !audit_out.empty())
      emit(sfp::report_to_json(report), audit_out);
    if (!audit_json && audit_out.empty()) print_report_table(report);
    return report.game_regular ? 0 : 3;
  }

  if (nd->parsed()) {
    const sfp::PotentialGame game = resolve_game(nd_game);
    sfp::SolverOptions opts = parse_solver(nd_solver);
    std::vector<sfp::NashDistribution> nds =
        sfp::solve_nash_distributions(game, nd_lambda, opts);
    if (nd_continue) {
      for (sfp::NashDistribution& d : nds) {
        try {
          const sfp::ContinuationPath path = sfp::continue_to_ne(
              game, d,
              sfp::default_lambda_schedule(nd_lambda, opts.schedule_ratio,
                                           opts.schedule_floor),
              opts);
          d.continued_ne = path.terminal_ne;
        } catch (const sfp::ContinuationFailure& e) {
          std::cerr << "warning: " << e.what() << '\n';
        }
      }
    }
    if (nd_json || !nd_out.empty()) {
      emit(sfp::nash_distributions_to_json(nds), nd_out);
    } else {
      std::printf("%zu Nash distribution(s) at lambda=%g\n", nds.size(),
                  nd_lambda);
      for (const auto& d : nds) {
        std::string coords;
        for (Eigen::Index i = 0; i < d.point.size(); ++i) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%s%.8g", i ? "," : "", d.point[i]);
          coords += buf;
        }
        std::printf("  (%s)  residual=%.2e  %s\n", coords.c_str(), d.residual,
                    sfp::to_string(d.classification));
      }
    }
    return 0;
  }

  if (simulate->parsed()) {
    const sfp::PotentialGame game = resolve_game(sim_game);
    std::optional<std::vector<int>> init;
    if (!sim_init.empty()) init = parse_ints(sim_init);
    const sfp::Trajectory traj = sfp::smooth_fp_run(
        game, sim_lambda, sim_steps, sim_seed, init, sim_thinning);
    if (!sim_out.empty()) sfp::save_trajectory_csv(traj, sim_out);
    if (sim_classify) {
      const std::vector<sfp::NashDistribution> nds =
          sfp::solve_nash_distributions(game, sim_lambda);
      const sfp::RunResult rr = sfp::classify_run(traj, nds);
      json j{{"seed", sim_seed},
             {"lambda", sim_lambda},
             {"nearest_nd_index", rr.nearest_nd},
             {"terminal_dist_to_nearest_nd", rr.nearest_nd_distance},
             {"converged_pure", rr.converged_pure}};
      emit(j, sim_result_out);
    } else if (sim_out.empty()) {
      sfp::save_trajectory_csv(traj, "/dev/stdout");
    }
    return 0;
  }

  if (flow->parsed()) {
    const sfp::PotentialGame game = resolve_game(flow_game);
    const std::vector<double> coords = parse_doubles(flow_x0);
    sfp::MixedProfile x0(static_cast<Eigen::Index>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i)
      x0[static_cast<Eigen::Index>(i)] = coords[i];
    const sfp::Trajectory traj =
        sfp::br_flow(game, flow_lambda, x0, flow_horizon, flow_h);
    sfp::save_trajectory_csv(traj, flow_out.empty() ? "/dev/stdout" : flow_out);
    return 0;
  }

  if (experiment->parsed()) {
    sfp::ExperimentConfig cfg;
    if (!exp_config.empty()) {
      std::ifstream in(exp_config);
      if (!in) throw sfp::ParseError("cannot open config " + exp_config);
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw sfp::ParseError(std::string("malformed config JSON: ") + e.what());
      }
      cfg = sfp::experiment_config_from_json(j);
    } else {
      cfg.game_path = exp_game.path;
      cfg.generate_players = exp_game.players;
      cfg.generate_seed = exp_game.seed;
      cfg.distribution = sfp::distribution_from_string(exp_game.dist);
      cfg.lambdas = parse_doubles(exp_lambdas);
      cfg.run_count = exp_runs;
      cfg.steps = exp_steps;
      cfg.base_seed = exp_seed;
      cfg.thinning = exp_thinning;
      cfg.skip_audit = exp_skip_audit;
      cfg.workers = exp_workers;
      cfg.solver = parse_solver(exp_solver);
      cfg.out_summary = exp_out;
      cfg.out_runs_csv = exp_runs_csv;
    }
    const sfp::PotentialGame game =
        cfg.game_path.empty()
            ? sfp::generate_game(cfg.generate_players, cfg.generate_seed,
                                 cfg.distribution)
            : sfp::load_game(cfg.game_path);
    const sfp::ExperimentSummary summary = sfp::run_experiment(game, cfg);
    if (exp_json || cfg.out_summary.empty())
      std::cout << sfp::summary_to_json(summary).dump(2) << '\n';
    else
      std::printf("experiment done: %zu lambda block(s), %d runs each; "
                  "summary written to %s\n",
                  summary.per_lambda.size(), summary.run_count,
                  cfg.out_summary.c_str());
    return 0;
  }

  if (sweep->parsed()) {
    const sfp::PotentialGame game = resolve_game(sweep_game);
    const std::vector<sfp::LambdaSweepRow> rows =
        sfp::lambda_sweep_report(game, parse_doubles(sweep_lambdas));
    if (sweep_json || !sweep_out.empty()) {
      emit(sfp::sweep_to_json(rows), sweep_out);
    } else {
      std::printf("%10s %5s %5s %18s %7s %9s %7s %s\n", "lambda", "|ND|",
                  "|NE|", "max pairing dist", "stable", "unstable", "nonhyp",
                  "flags");
      for (const auto& r : rows)
        std::printf("%10.4g %5d %5d %18.6g %7d %9d %7d %s\n", r.lambda,
                    r.nd_count, r.ne_count, r.max_pairing_distance, r.stable,
                    r.unstable, r.non_hyperbolic, r.flag_reason.c_str());
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const sfp::AuditFailedError& e) {
    std::cerr << "audit failure: " << e.what() << '\n';
    return 3;
  } catch (const sfp::InvalidInputError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const sfp::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
