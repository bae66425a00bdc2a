#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sfp/errors.hpp"

namespace sfp {

// Point in [0,1]^N. Coordinate i is the probability that player i plays its
// first action; the complement goes to the second action.
using MixedProfile = Eigen::VectorXd;

enum class PlayerRole { Mixing, PureAction1, PureAction2 };

// Per-player support tags. PureAction1 pins x_i = 1, PureAction2 pins
// x_i = 0, Mixing leaves the coordinate free.
using MixingPattern = std::vector<PlayerRole>;

int mixing_count(const MixingPattern& pattern);
std::string pattern_to_string(const MixingPattern& pattern);
MixingPattern pattern_from_string(const std::string& s);

// N-player, two-action game with identical interests. The potential tensor
// is stored flat: bit (i) of a profile index is 0 when player i plays its
// first action and 1 otherwise, player 0 being the least significant bit.
class PotentialGame {
 public:
  static constexpr int kMaxPlayers = 24;

  PotentialGame(int num_players, std::vector<double> potential);

  int num_players() const { return num_players_; }
  std::uint32_t num_profiles() const { return 1u << num_players_; }
  const std::vector<double>& potential() const { return potential_; }
  double payoff(std::uint32_t profile) const { return potential_[profile]; }

  // Optional metadata carried through file I/O.
  std::string name;
  std::optional<std::uint64_t> seed;

 private:
  int num_players_;
  std::vector<double> potential_;
};

// Throws InvalidInputError unless x has the game's dimension and lies in
// the cube.
void validate_profile(const PotentialGame& game, const MixedProfile& x);

// Expected potential U(x): the multilinear extension of the tensor,
// evaluated by contracting one player at a time (O(2^N), not per-profile
// enumeration; the enumeration form lives in the tests as an oracle).
double expected_potential(const PotentialGame& game, const MixedProfile& x);

// U(a_i^k, x_{-i}) for action k in {1, 2}; independent of x[i].
double expected_potential_pinned(const PotentialGame& game, int player,
                                 int action, const MixedProfile& x);

// Component i is U(a_i^1, x_{-i}) - U(a_i^2, x_{-i}).
Eigen::VectorXd potential_gradient(const PotentialGame& game,
                                   const MixedProfile& x);

// Mixed second partials of U. The diagonal is exactly zero (U is affine in
// each coordinate) and the matrix is symmetric.
Eigen::MatrixXd potential_hessian(const PotentialGame& game,
                                  const MixedProfile& x);

// Submatrix of the Hessian on the mixing players, in pattern order.
// Throws InvalidInputError when the pattern has no mixing player.
Eigen::MatrixXd restricted_hessian(const PotentialGame& game,
                                   const MixedProfile& x,
                                   const MixingPattern& pattern);

namespace detail {
// Unchecked multilinear contraction with per-player weight pairs
// (w1 on the first action, w2 on the second). Internal building block for
// the operations above and for evaluation slightly outside the cube
// (Runge-Kutta stage points, finite-difference probes).
double contract(const PotentialGame& game, const double* w1,
                const double* w2);
double expected_potential_unchecked(const PotentialGame& game,
                                    const MixedProfile& x);
double pinned_difference_unchecked(const PotentialGame& game, int player,
                                   const MixedProfile& x);
}  // namespace detail

}  // namespace sfp
