#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>

#include "sfp/dynamics.hpp"
#include "sfp/game.hpp"
#include "sfp/response.hpp"
#include "sfp/stability.hpp"

namespace sfp {

using json = nlohmann::ordered_json;

// Game JSON: {"num_players": N, "potential": [2^N numbers], "name"?, "seed"?}.
// Numbers round-trip exactly (serialized at full precision). Loading
// validates the schema and throws ParseError with the offending field or
// index on malformed input.
json game_to_json(const PotentialGame& game);
PotentialGame game_from_json(const json& j);
void save_game(const PotentialGame& game, const std::filesystem::path& path);
PotentialGame load_game(const std::filesystem::path& path);

// Trajectory CSV: header `t,x_1,...,x_N`, one row per retained sample.
void save_trajectory_csv(const Trajectory& traj,
                         const std::filesystem::path& path);

json nash_distribution_to_json(const NashDistribution& nd);
json nash_distributions_to_json(const std::vector<NashDistribution>& nds);

json report_to_json(const EquilibriumReport& report);

// Solver options from a JSON object; unknown keys are rejected.
SolverOptions solver_options_from_json(const json& j);

json profile_to_json(const MixedProfile& x);
MixedProfile profile_from_json(const json& j);

}  // namespace sfp
