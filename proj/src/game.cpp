#include "sfp/game.hpp"

#include <cmath>
#include <sstream>

namespace sfp {

int mixing_count(const MixingPattern& pattern) {
  int n = 0;
  for (PlayerRole r : pattern) n += (r == PlayerRole::Mixing) ? 1 : 0;
  return n;
}

std::string pattern_to_string(const MixingPattern& pattern) {
  std::string out;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (i) out += ',';
    switch (pattern[i]) {
      case PlayerRole::Mixing: out += 'M'; break;
      case PlayerRole::PureAction1: out += '1'; break;
      case PlayerRole::PureAction2: out += '0'; break;
    }
  }
  return out;
}

MixingPattern pattern_from_string(const std::string& s) {
  MixingPattern pattern;
  for (char c : s) {
    switch (c) {
      case ',': break;
      case 'M': pattern.push_back(PlayerRole::Mixing); break;
      case '1': pattern.push_back(PlayerRole::PureAction1); break;
      case '0': pattern.push_back(PlayerRole::PureAction2); break;
      default:
        throw InvalidInputError("unrecognized pattern character '" +
                                std::string(1, c) + "'");
    }
  }
  return pattern;
}

PotentialGame::PotentialGame(int num_players, std::vector<double> potential)
    : num_players_(num_players), potential_(std::move(potential)) {
  if (num_players_ < 1)
    throw InvalidInputError("a game needs at least one player");
  if (num_players_ > kMaxPlayers)
    throw InvalidInputError("num_players exceeds the hard cap of " +
                            std::to_string(kMaxPlayers));
  const std::size_t expected = std::size_t{1} << num_players_;
  if (potential_.size() != expected) {
    std::ostringstream msg;
    msg << "potential array must have " << expected << " entries for "
        << num_players_ << " players, got " << potential_.size();
    throw InvalidInputError(msg.str());
  }
  for (std::size_t i = 0; i < potential_.size(); ++i) {
    if (!std::isfinite(potential_[i]))
      throw InvalidInputError("potential entry " + std::to_string(i) +
                              " is not finite");
  }
}

void validate_profile(const PotentialGame& game, const MixedProfile& x) {
  if (x.size() != game.num_players())
    throw InvalidInputError("profile has " + std::to_string(x.size()) +
                            " coordinates, game has " +
                            std::to_string(game.num_players()) + " players");
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0 && x[i] <= 1.0))
      throw InvalidInputError("profile coordinate " + std::to_string(i) +
                              " outside [0,1]");
  }
}

namespace detail {

double contract(const PotentialGame& game, const double* w1,
                const double* w2) {
  thread_local std::vector<double> buf;
  const std::vector<double>& u = game.potential();
  buf.assign(u.begin(), u.end());
  std::size_t len = buf.size();
  for (int i = 0; i < game.num_players(); ++i) {
    len >>= 1;
    const double a = w1[i];
    const double b = w2[i];
    for (std::size_t r = 0; r < len; ++r)
      buf[r] = a * buf[2 * r] + b * buf[2 * r + 1];
  }
  return buf[0];
}

double expected_potential_unchecked(const PotentialGame& game,
                                    const MixedProfile& x) {
  thread_local std::vector<double> w1, w2;
  const int n = game.num_players();
  w1.resize(n);
  w2.resize(n);
  for (int i = 0; i < n; ++i) {
    w1[i] = x[i];
    w2[i] = 1.0 - x[i];
  }
  return contract(game, w1.data(), w2.data());
}

// U(a_i^1, x_{-i}) - U(a_i^2, x_{-i}), computed in one contraction with the
// signed weight pair (1, -1) on player i.
double pinned_difference_unchecked(const PotentialGame& game, int player,
                                   const MixedProfile& x) {
  thread_local std::vector<double> w1, w2;
  const int n = game.num_players();
  w1.resize(n);
  w2.resize(n);
  for (int i = 0; i < n; ++i) {
    w1[i] = x[i];
    w2[i] = 1.0 - x[i];
  }
  w1[player] = 1.0;
  w2[player] = -1.0;
  return contract(game, w1.data(), w2.data());
}

}  // namespace detail

double expected_potential(const PotentialGame& game, const MixedProfile& x) {
  validate_profile(game, x);
  return detail::expected_potential_unchecked(game, x);
}

double expected_potential_pinned(const PotentialGame& game, int player,
                                 int action, const MixedProfile& x) {
  validate_profile(game, x);
  if (player < 0 || player >= game.num_players())
    throw InvalidInputError("player index out of range");
  if (action != 1 && action != 2)
    throw InvalidInputError("action index must be 1 or 2");
  thread_local std::vector<double> w1, w2;
  const int n = game.num_players();
  w1.resize(n);
  w2.resize(n);
  for (int i = 0; i < n; ++i) {
    w1[i] = x[i];
    w2[i] = 1.0 - x[i];
  }
  w1[player] = (action == 1) ? 1.0 : 0.0;
  w2[player] = (action == 1) ? 0.0 : 1.0;
  return detail::contract(game, w1.data(), w2.data());
}

Eigen::VectorXd potential_gradient(const PotentialGame& game,
                                   const MixedProfile& x) {
  validate_profile(game, x);
  const int n = game.num_players();
  Eigen::VectorXd grad(n);
  for (int i = 0; i < n; ++i)
    grad[i] = detail::pinned_difference_unchecked(game, i, x);
  return grad;
}

Eigen::MatrixXd potential_hessian(const PotentialGame& game,
                                  const MixedProfile& x) {
  validate_profile(game, x);
  const int n = game.num_players();
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n, n);
  thread_local std::vector<double> w1, w2;
  w1.resize(n);
  w2.resize(n);
  for (int j = 0; j < n; ++j) {
    w1[j] = x[j];
    w2[j] = 1.0 - x[j];
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double si1 = w1[i], si2 = w2[i], sj1 = w1[j], sj2 = w2[j];
      w1[i] = 1.0;
      w2[i] = -1.0;
      w1[j] = 1.0;
      w2[j] = -1.0;
      const double d = detail::contract(game, w1.data(), w2.data());
      hess(i, j) = d;
      hess(j, i) = d;
      w1[i] = si1;
      w2[i] = si2;
      w1[j] = sj1;
      w2[j] = sj2;
    }
  }
  return hess;
}

Eigen::MatrixXd restricted_hessian(const PotentialGame& game,
                                   const MixedProfile& x,
                                   const MixingPattern& pattern) {
  if (static_cast<int>(pattern.size()) != game.num_players())
    throw InvalidInputError("pattern length does not match player count");
  std::vector<int> mixing;
  for (int i = 0; i < game.num_players(); ++i)
    if (pattern[i] == PlayerRole::Mixing) mixing.push_back(i);
  if (mixing.empty())
    throw InvalidInputError(
        "restricted Hessian undefined for a fully pure pattern");
  const Eigen::MatrixXd hess = potential_hessian(game, x);
  const int m = static_cast<int>(mixing.size());
  Eigen::MatrixXd out(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) out(a, b) = hess(mixing[a], mixing[b]);
  return out;
}

}  // namespace sfp
