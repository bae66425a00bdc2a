#include "sfp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <thread>

#include "sfp/rng.hpp"

namespace sfp {

const char* to_string(Distribution d) {
  return d == Distribution::StandardNormal ? "normal" : "uniform";
}

Distribution distribution_from_string(const std::string& s) {
  if (s == "normal" || s == "standard-normal") return Distribution::StandardNormal;
  if (s == "uniform" || s == "uniform-symmetric")
    return Distribution::UniformSymmetric;
  throw InvalidInputError("unknown distribution '" + s +
                          "' (expected 'normal' or 'uniform')");
}

PotentialGame generate_game(int n, std::uint64_t seed, Distribution dist) {
  if (n < 1 || n > PotentialGame::kMaxPlayers)
    throw InvalidInputError("player count must be between 1 and " +
                            std::to_string(PotentialGame::kMaxPlayers));
  const std::size_t entries = std::size_t{1} << n;
  std::vector<double> potential(entries);
  for (std::size_t t = 0; t < entries; ++t) {
    potential[t] = dist == Distribution::StandardNormal
                       ? rng::normal(seed, t)
                       : 2.0 * rng::uniform(seed, t, 0) - 1.0;
  }
  PotentialGame game(n, std::move(potential));
  game.seed = seed;
  game.name = std::string(to_string(dist)) + "-n" + std::to_string(n) +
              "-seed" + std::to_string(seed);
  return game;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SFP_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(r) for r in [0, count) on `workers` threads. Each index writes
// only its own output slot, so the aggregate is order independent.
static void parallel_for(int count, int workers,
                         const std::function<void(int)>& fn) {
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (int r = 0; r < count; ++r) fn(r);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int r = next.fetch_add(1); r < count; r = next.fetch_add(1)) fn(r);
    });
  }
  for (std::thread& t : pool) t.join();
}

ExperimentSummary run_experiment(const PotentialGame& game,
                                 const ExperimentConfig& config) {
  if (config.run_count < 1) throw InvalidInputError("run count must be >= 1");
  if (config.lambdas.empty())
    throw InvalidInputError("experiment needs at least one lambda");
  for (double lam : config.lambdas)
    if (!(lam > 0.0)) throw InvalidInputError("lambdas must be positive");
  if (!(config.visit_tol > 0.0))
    throw InvalidInputError("visit tolerance must be positive");

  const auto start = std::chrono::steady_clock::now();
  ExperimentSummary summary;
  summary.run_count = config.run_count;
  summary.steps = config.steps;
  summary.base_seed = config.base_seed;

  summary.audit = audit_regularity(game, config.audit_tols);
  if (!config.skip_audit && !summary.audit.game_regular)
    throw AuditFailedError(
        "game failed the regularity audit; pass skip_audit to run anyway");

  const int workers = resolve_workers(config.workers);

  for (std::size_t li = 0; li < config.lambdas.size(); ++li) {
    LambdaBlock block;
    block.lambda = config.lambdas[li];

    SolverOptions solver = config.solver;
    for (const auto& e : summary.audit.pure_ne)
      solver.extra_starts.push_back(e.point);
    for (const auto& e : summary.audit.mixed_ne)
      solver.extra_starts.push_back(e.point);
    for (MixedProfile& p :
         nd_predictor_starts(game, summary.audit, block.lambda))
      solver.extra_starts.push_back(std::move(p));
    block.nds = solve_nash_distributions(game, block.lambda, solver);

    block.runs.assign(config.run_count, RunRecord{});
    const std::uint64_t seed_base = li * static_cast<std::uint64_t>(config.run_count);
    parallel_for(config.run_count, workers, [&](int r) {
      RunRecord rec;
      rec.run = r;
      rec.seed = rng::split(config.base_seed, seed_base + r);
      const Trajectory traj =
          smooth_fp_run(game, block.lambda, config.steps, rec.seed,
                        std::nullopt, config.thinning);
      const RunResult rr = classify_run(traj, block.nds, config.tail_fraction,
                                        config.pure_tol);
      rec.terminal_dist_to_nearest_nd = rr.nearest_nd_distance;
      rec.nearest_nd_index = rr.nearest_nd;
      rec.converged_pure = rr.converged_pure;
      rec.terminal_dist_to_pure_nd = std::numeric_limits<double>::quiet_NaN();
      for (const NashDistribution& nd : block.nds) {
        if (nd.classification != StabilityClass::Stable) continue;
        const double d = sup_distance(traj.terminal(), nd.point);
        if (!(d >= rec.terminal_dist_to_pure_nd))  // NaN-aware min
          rec.terminal_dist_to_pure_nd = d;
      }
      block.runs[r] = rec;
    });

    block.nd_visits.assign(block.nds.size(), 0);
    int converged = 0;
    double sum_pure = 0.0;
    block.max_terminal_dist_to_pure_nd = 0.0;
    int pure_count = 0;
    for (const RunRecord& rec : block.runs) {
      converged += rec.converged_pure ? 1 : 0;
      if (rec.terminal_dist_to_nearest_nd <= config.visit_tol)
        ++block.nd_visits[rec.nearest_nd_index];
      else
        ++block.unclassified;
      if (std::isfinite(rec.terminal_dist_to_pure_nd)) {
        sum_pure += rec.terminal_dist_to_pure_nd;
        block.max_terminal_dist_to_pure_nd = std::max(
            block.max_terminal_dist_to_pure_nd, rec.terminal_dist_to_pure_nd);
        ++pure_count;
      }
    }
    block.fraction_converged_pure =
        static_cast<double>(converged) / config.run_count;
    block.mean_terminal_dist_to_pure_nd =
        pure_count > 0 ? sum_pure / pure_count
                       : std::numeric_limits<double>::quiet_NaN();
    summary.per_lambda.push_back(std::move(block));
  }

  summary.wall_clock_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                start)
          .count();

  if (!config.out_summary.empty()) {
    std::ofstream out(config.out_summary);
    if (!out)
      throw ParseError("cannot open " + config.out_summary + " for writing");
    out << summary_to_json(summary).dump(2) << '\n';
  }
  if (!config.out_runs_csv.empty()) {
    for (std::size_t li = 0; li < summary.per_lambda.size(); ++li) {
      std::filesystem::path path = config.out_runs_csv;
      if (summary.per_lambda.size() > 1) {
        path = path.parent_path() /
               (path.stem().string() + ".lambda" + std::to_string(li) +
                path.extension().string());
      }
      write_runs_csv(summary.per_lambda[li], path);
    }
  }
  return summary;
}

void write_runs_csv(const LambdaBlock& block,
                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  out << "run,seed,terminal_dist_to_nearest_nd,nearest_nd_index,converged_pure\n";
  out.precision(17);
  for (const RunRecord& rec : block.runs) {
    out << rec.run << ',' << rec.seed << ','
        << rec.terminal_dist_to_nearest_nd << ',' << rec.nearest_nd_index
        << ',' << (rec.converged_pure ? 1 : 0) << '\n';
  }
}

json summary_to_json(const ExperimentSummary& summary, bool include_timing) {
  json j;
  j["audit"] = report_to_json(summary.audit);
  j["run_count"] = summary.run_count;
  j["steps"] = summary.steps;
  j["base_seed"] = summary.base_seed;
  j["per_lambda"] = json::array();
  for (const LambdaBlock& block : summary.per_lambda) {
    json b;
    b["lambda"] = block.lambda;
    b["nds"] = nash_distributions_to_json(block.nds);
    b["fraction_converged_pure"] = block.fraction_converged_pure;
    b["nd_visits"] = block.nd_visits;
    b["unclassified"] = block.unclassified;
    if (std::isfinite(block.mean_terminal_dist_to_pure_nd)) {
      b["mean_terminal_dist_to_pure_nd"] = block.mean_terminal_dist_to_pure_nd;
      b["max_terminal_dist_to_pure_nd"] = block.max_terminal_dist_to_pure_nd;
    } else {
      b["mean_terminal_dist_to_pure_nd"] = nullptr;
      b["max_terminal_dist_to_pure_nd"] = nullptr;
    }
    json runs = json::array();
    for (const RunRecord& rec : block.runs) {
      runs.push_back(json{{"run", rec.run},
                          {"seed", rec.seed},
                          {"terminal_dist_to_nearest_nd",
                           rec.terminal_dist_to_nearest_nd},
                          {"nearest_nd_index", rec.nearest_nd_index},
                          {"converged_pure", rec.converged_pure}});
    }
    b["runs"] = std::move(runs);
    j["per_lambda"].push_back(std::move(b));
  }
  if (include_timing) j["wall_clock_ms"] = summary.wall_clock_ms;
  return j;
}

ExperimentConfig experiment_config_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  ExperimentConfig cfg;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "game") cfg.game_path = value.get<std::string>();
      else if (key == "players") cfg.generate_players = value.get<int>();
      else if (key == "game_seed") cfg.generate_seed = value.get<std::uint64_t>();
      else if (key == "distribution")
        cfg.distribution = distribution_from_string(value.get<std::string>());
      else if (key == "lambdas") cfg.lambdas = value.get<std::vector<double>>();
      else if (key == "runs") cfg.run_count = value.get<int>();
      else if (key == "steps") cfg.steps = value.get<std::int64_t>();
      else if (key == "base_seed") cfg.base_seed = value.get<std::uint64_t>();
      else if (key == "thinning") cfg.thinning = value.get<std::int64_t>();
      else if (key == "tail_fraction") cfg.tail_fraction = value.get<double>();
      else if (key == "pure_tol") cfg.pure_tol = value.get<double>();
      else if (key == "visit_tol") cfg.visit_tol = value.get<double>();
      else if (key == "skip_audit") cfg.skip_audit = value.get<bool>();
      else if (key == "workers") cfg.workers = value.get<int>();
      else if (key == "solver") cfg.solver = solver_options_from_json(value);
      else if (key == "out_summary") cfg.out_summary = value.get<std::string>();
      else if (key == "out_runs_csv") cfg.out_runs_csv = value.get<std::string>();
      else throw ParseError("unknown config key '" + key + "'");
    } catch (const json::exception&) {
      throw ParseError("config key '" + key + "' has the wrong type");
    }
  }
  if (cfg.game_path.empty() && cfg.generate_players == 0)
    throw ParseError("config needs either 'game' or 'players'");
  if (cfg.lambdas.empty()) throw ParseError("config needs 'lambdas'");
  if (cfg.run_count < 1 || cfg.steps < 1 || cfg.thinning < 1 ||
      !(cfg.tail_fraction > 0 && cfg.tail_fraction <= 1) ||
      !(cfg.pure_tol > 0) || !(cfg.visit_tol > 0))
    throw ParseError("config values out of range");
  return cfg;
}

std::vector<LambdaSweepRow> lambda_sweep_report(
    const PotentialGame& game, const std::vector<double>& lambdas,
    const RegularityTolerances& audit_tols, const SolverOptions& solver) {
  const EquilibriumReport report = audit_regularity(game, audit_tols);
  std::vector<MixedProfile> nes;
  for (const auto& e : report.pure_ne) nes.push_back(e.point);
  for (const auto& e : report.mixed_ne) nes.push_back(e.point);

  std::vector<LambdaSweepRow> rows;
  for (double lam : lambdas) {
    LambdaSweepRow row;
    row.lambda = lam;
    row.ne_count = static_cast<int>(nes.size());

    SolverOptions opts = solver;
    for (const MixedProfile& p : nes) opts.extra_starts.push_back(p);
    for (MixedProfile& p : nd_predictor_starts(game, report, lam))
      opts.extra_starts.push_back(std::move(p));
    std::vector<NashDistribution> nds =
        solve_nash_distributions(game, lam, opts);
    row.nd_count = static_cast<int>(nds.size());
    if (row.nd_count != row.ne_count) {
      row.flagged = true;
      row.flag_reason = "|ND| != |NE|";
    }

    std::vector<int> hits(nes.size(), 0);
    for (NashDistribution& nd : nds) {
      switch (nd.classification) {
        case StabilityClass::Stable: ++row.stable; break;
        case StabilityClass::Unstable: ++row.unstable; break;
        default: ++row.non_hyperbolic; break;
      }
      try {
        const ContinuationPath path = continue_to_ne(
            game, nd,
            default_lambda_schedule(lam, opts.schedule_ratio,
                                    opts.schedule_floor),
            opts);
        nd.continued_ne = path.terminal_ne;
      } catch (const ContinuationFailure&) {
        row.flagged = true;
        if (!row.flag_reason.empty()) row.flag_reason += "; ";
        row.flag_reason += "branch lost during continuation";
        continue;
      }
      int best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < nes.size(); ++k) {
        const double d = sup_distance(*nd.continued_ne, nes[k]);
        if (d < best_d) { best_d = d; best = static_cast<int>(k); }
      }
      if (best >= 0) {
        ++hits[best];
        row.max_pairing_distance = std::max(
            row.max_pairing_distance, sup_distance(nd.point, nes[best]));
      }
    }
    for (std::size_t k = 0; k < hits.size(); ++k) {
      if (hits[k] > 1) {
        row.flagged = true;
        if (!row.flag_reason.empty()) row.flag_reason += "; ";
        row.flag_reason += "pairing ambiguity (two NDs continue to one NE)";
        break;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json sweep_to_json(const std::vector<LambdaSweepRow>& rows) {
  json arr = json::array();
  for (const LambdaSweepRow& row : rows) {
    arr.push_back(json{{"lambda", row.lambda},
                       {"nd_count", row.nd_count},
                       {"ne_count", row.ne_count},
                       {"max_pairing_distance", row.max_pairing_distance},
                       {"stable", row.stable},
                       {"unstable", row.unstable},
                       {"non_hyperbolic", row.non_hyperbolic},
                       {"flagged", row.flagged},
                       {"flag_reason", row.flag_reason}});
  }
  return arr;
}

}  // namespace sfp
