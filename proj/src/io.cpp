#include "sfp/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace sfp {

json profile_to_json(const MixedProfile& x) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) arr.push_back(x[i]);
  return arr;
}

MixedProfile profile_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("profile must be a JSON array");
  MixedProfile x(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw ParseError("profile entry " + std::to_string(i) +
                       " is not a number");
    x[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return x;
}

json game_to_json(const PotentialGame& game) {
  json j;
  j["num_players"] = game.num_players();
  j["potential"] = game.potential();
  if (!game.name.empty()) j["name"] = game.name;
  if (game.seed) j["seed"] = *game.seed;
  return j;
}

PotentialGame game_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("game file must hold a JSON object");
  if (!j.contains("num_players") || !j["num_players"].is_number_integer())
    throw ParseError("missing or non-integer field 'num_players'");
  const long long n = j["num_players"].get<long long>();
  if (n < 1 || n > PotentialGame::kMaxPlayers)
    throw ParseError("'num_players' must be between 1 and " +
                     std::to_string(PotentialGame::kMaxPlayers));
  if (!j.contains("potential") || !j["potential"].is_array())
    throw ParseError("missing or non-array field 'potential'");
  const json& arr = j["potential"];
  const std::size_t expected = std::size_t{1} << n;
  if (arr.size() != expected)
    throw ParseError("'potential' must have " + std::to_string(expected) +
                     " entries for " + std::to_string(n) + " players, got " +
                     std::to_string(arr.size()));
  std::vector<double> potential(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    if (!arr[i].is_number())
      throw ParseError("potential entry " + std::to_string(i) +
                       " is not a finite number");
    potential[i] = arr[i].get<double>();
    if (!std::isfinite(potential[i]))
      throw ParseError("potential entry " + std::to_string(i) +
                       " is not a finite number");
  }
  PotentialGame game(static_cast<int>(n), std::move(potential));
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw ParseError("'name' must be a string");
    game.name = j["name"].get<std::string>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      throw ParseError("'seed' must be an integer");
    game.seed = j["seed"].get<std::uint64_t>();
  }
  return game;
}

void save_game(const PotentialGame& game, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  out << game_to_json(game).dump(2) << '\n';
}

PotentialGame load_game(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("malformed JSON in " + path.string() + ": " + e.what());
  }
  return game_from_json(j);
}

void save_trajectory_csv(const Trajectory& traj,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  out << 't';
  const Eigen::Index n = traj.states.empty() ? 0 : traj.states.front().size();
  for (Eigen::Index i = 0; i < n; ++i) out << ",x_" << (i + 1);
  out << '\n';
  std::ostringstream row;
  row.precision(17);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    row.str("");
    row << traj.times[k];
    for (Eigen::Index i = 0; i < n; ++i) row << ',' << traj.states[k][i];
    out << row.str() << '\n';
  }
}

json nash_distribution_to_json(const NashDistribution& nd) {
  json j;
  j["point"] = profile_to_json(nd.point);
  j["lambda"] = nd.lambda;
  j["residual"] = nd.residual;
  j["classification"] = to_string(nd.classification);
  if (nd.continued_ne) j["terminal_ne"] = profile_to_json(*nd.continued_ne);
  return j;
}

json nash_distributions_to_json(const std::vector<NashDistribution>& nds) {
  json arr = json::array();
  for (const NashDistribution& nd : nds)
    arr.push_back(nash_distribution_to_json(nd));
  return arr;
}

static json entry_to_json(const EquilibriumEntry& e) {
  json j;
  j["point"] = profile_to_json(e.point);
  j["pattern"] = pattern_to_string(e.pattern);
  if (std::isfinite(e.quasi_strict_margin))
    j["quasi_strict_margin"] = e.quasi_strict_margin;
  else
    j["quasi_strict_margin"] = nullptr;  // fully mixed: no pure player to check
  if (e.restricted_hessian_det)
    j["restricted_hessian_det"] = *e.restricted_hessian_det;
  j["regular"] = e.regular;
  return j;
}

json report_to_json(const EquilibriumReport& report) {
  json j;
  j["pure_ne"] = json::array();
  for (const auto& e : report.pure_ne) j["pure_ne"].push_back(entry_to_json(e));
  j["mixed_ne"] = json::array();
  for (const auto& e : report.mixed_ne)
    j["mixed_ne"].push_back(entry_to_json(e));
  j["degenerate"] = report.degenerate;
  j["degeneracy_notes"] = report.degeneracy_notes;
  j["game_regular"] = report.game_regular;
  return j;
}

SolverOptions solver_options_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("solver options must be a JSON object");
  SolverOptions opts;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "tolerance") opts.tolerance = value.get<double>();
      else if (key == "damping") opts.damping = value.get<double>();
      else if (key == "damped_steps") opts.damped_steps = value.get<int>();
      else if (key == "newton_max_iters") opts.newton_max_iters = value.get<int>();
      else if (key == "vertex_inset") opts.vertex_inset = value.get<double>();
      else if (key == "grid_density") opts.grid_density = value.get<int>();
      else if (key == "dedup_radius") opts.dedup_radius = value.get<double>();
      else if (key == "schedule_ratio") opts.schedule_ratio = value.get<double>();
      else if (key == "schedule_floor") opts.schedule_floor = value.get<double>();
      else if (key == "snap_tolerance") opts.snap_tolerance = value.get<double>();
      else throw ParseError("unknown solver option '" + key + "'");
    } catch (const json::exception&) {
      throw ParseError("solver option '" + key + "' has the wrong type");
    }
  }
  if (!(opts.tolerance > 0) || !(opts.damping > 0 && opts.damping <= 1) ||
      !(opts.dedup_radius > 0) ||
      !(opts.schedule_ratio > 0 && opts.schedule_ratio < 1))
    throw ParseError("solver options out of range");
  return opts;
}

}  // namespace sfp
