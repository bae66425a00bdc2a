#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfp/dynamics.hpp"
#include "sfp/game.hpp"
#include "sfp/io.hpp"
#include "sfp/response.hpp"
#include "sfp/stability.hpp"

namespace sfp {

enum class Distribution { UniformSymmetric, StandardNormal };
const char* to_string(Distribution d);
Distribution distribution_from_string(const std::string& s);

// 2^n i.i.d. potential entries drawn deterministically from the seed;
// entry t consumes the counter-t stream.
PotentialGame generate_game(int n, std::uint64_t seed,
                            Distribution dist = Distribution::StandardNormal);

struct ExperimentConfig {
  // Game source: a file path, or generator parameters when the path is empty.
  std::string game_path;
  int generate_players = 0;
  std::uint64_t generate_seed = 0;
  Distribution distribution = Distribution::StandardNormal;

  std::vector<double> lambdas;
  int run_count = 200;
  std::int64_t steps = 100000;
  std::uint64_t base_seed = 0;
  std::int64_t thinning = 100;

  double tail_fraction = 0.1;
  double pure_tol = 0.1;
  double visit_tol = 0.05;

  bool skip_audit = false;
  RegularityTolerances audit_tols;
  StabilityTolerances stability_tols;
  SolverOptions solver;

  int workers = 0;  // 0: SFP_WORKERS env var, else hardware concurrency

  std::string out_summary;   // optional output paths
  std::string out_runs_csv;
};

ExperimentConfig experiment_config_from_json(const json& j);

struct RunRecord {
  int run = 0;
  std::uint64_t seed = 0;
  double terminal_dist_to_nearest_nd = 0.0;
  int nearest_nd_index = -1;
  bool converged_pure = false;
  // Distance to the nearest linearly stable ND; NaN when none exists.
  double terminal_dist_to_pure_nd = 0.0;
};

struct LambdaBlock {
  double lambda = 0.0;
  std::vector<NashDistribution> nds;
  std::vector<RunRecord> runs;
  double fraction_converged_pure = 0.0;
  std::vector<int> nd_visits;  // runs whose terminal sits within visit_tol
  int unclassified = 0;        // runs not within visit_tol of any ND
  double mean_terminal_dist_to_pure_nd = 0.0;
  double max_terminal_dist_to_pure_nd = 0.0;
};

struct ExperimentSummary {
  EquilibriumReport audit;
  std::vector<LambdaBlock> per_lambda;
  int run_count = 0;
  std::int64_t steps = 0;
  std::uint64_t base_seed = 0;
  double wall_clock_ms = 0.0;
};

// Solves and classifies the Nash distributions at every lambda, runs
// `run_count` independent smooth FP instances per lambda on a worker pool
// (run r of block b uses seed split(base_seed, b * run_count + r)), and
// aggregates. The result is bit-identical for any worker count. Throws
// AuditFailedError when the game fails the regularity audit and skip_audit
// is not set.
ExperimentSummary run_experiment(const PotentialGame& game,
                                 const ExperimentConfig& config);

// Deterministic part of the summary (everything except wall-clock).
json summary_to_json(const ExperimentSummary& summary,
                     bool include_timing = true);
void write_runs_csv(const LambdaBlock& block,
                    const std::filesystem::path& path);

struct LambdaSweepRow {
  double lambda = 0.0;
  int nd_count = 0;
  int ne_count = 0;
  double max_pairing_distance = 0.0;
  int stable = 0;
  int unstable = 0;
  int non_hyperbolic = 0;
  bool flagged = false;
  std::string flag_reason;
};

// Per-lambda pairing of Nash distributions with the equilibria they
// continue to. Rows are flagged (not rejected) when |ND| != |NE|, when two
// NDs continue to the same equilibrium, or when a branch is lost.
std::vector<LambdaSweepRow> lambda_sweep_report(
    const PotentialGame& game, const std::vector<double>& lambdas,
    const RegularityTolerances& audit_tols = {},
    const SolverOptions& solver = {});

json sweep_to_json(const std::vector<LambdaSweepRow>& rows);

// Worker-pool size resolution: explicit > SFP_WORKERS > hardware.
int resolve_workers(int requested);

}  // namespace sfp
