#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "sfp/game.hpp"
#include "sfp/response.hpp"

namespace sfp {

struct StabilityTolerances {
  // Hyperbolic iff min |eigenvalue| > singular * (1 + spectral radius).
  double singular = 1e-7;
  // Linearly stable iff every real part < -margin.
  double margin = 1e-7;
  // classify_rest_point rejects points with a larger fixed-point residual.
  double rest_point_residual = 1e-8;
};

// Jacobian of F(x) = BR(x) - x:
//   DF(i,j) = (1/lambda) * b_i (1 - b_i) * d2U/dx_i dx_j - delta_ij,
// with b the joint smoothed response at x. The diagonal is exactly -1.
Eigen::MatrixXd jacobian(const PotentialGame& game, double lambda,
                         const MixedProfile& x);

// Block assembly of the same matrix at a fixed point (b = x), split into
// mixing and pure index sets by the pattern:
//   (1/lambda) [ R H(x)  B ; B^T  C ] - I
// with R = diag(x_i(1-x_i)) on the mixing block. Entries are returned in
// natural player order. Used to cross-check `jacobian` at solved fixed
// points.
Eigen::MatrixXd jacobian_fixed_point_blocks(const PotentialGame& game,
                                            double lambda,
                                            const MixedProfile& fixed_point,
                                            const MixingPattern& pattern);

// All eigenvalues of a dense real square matrix (dimension <= 24), sorted
// by descending real part then descending imaginary part.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m);

struct RestPointClassification {
  std::vector<std::complex<double>> eigenvalues;
  bool hyperbolic = false;
  bool linearly_stable = false;
  double spectral_margin = 0.0;  // max real part
  StabilityClass label() const;
};

// Eigenvalue classification of a rest point of the smoothed response flow.
// Throws NotARestPointError when x is not a fixed point to within
// tols.rest_point_residual.
RestPointClassification classify_rest_point(const PotentialGame& game,
                                            double lambda,
                                            const MixedProfile& x,
                                            const StabilityTolerances& tols = {});

// All pure Nash equilibria as cube vertices in x-coordinates (weak
// inequalities), by brute force over the 2^N vertices and N deviations.
std::vector<MixedProfile> enumerate_pure_ne(const PotentialGame& game);

struct MixedEquilibrium {
  MixedProfile point;
  MixingPattern pattern;
};

struct MixedNeOptions {
  int grid = 4;               // Newton starts per mixing axis
  int max_starts = 4096;      // per-pattern cap; grid is reduced to fit
  double interior_eps = 1e-6; // mixing coordinates must clear the boundary
  double ne_tol = 1e-9;       // tolerance on pure players' deviation check
  double residual_tol = 1e-12;
  int newton_max_iters = 100;
  double degeneracy_tol = 1e-9;
  double dedup_radius = 1e-8;
};

struct MixedNeResult {
  std::vector<MixedEquilibrium> equilibria;
  bool degenerate = false;
  std::vector<std::string> degeneracy_notes;
};

// Mixed equilibria for every support pattern with at least one mixing
// player (documented cap N <= 8). Patterns with a single mixing player are
// resolved analytically: the stationarity value is constant in that
// coordinate, so a near-zero value flags a degenerate continuum instead of
// an isolated equilibrium. Two-player-mixing patterns are solved exactly
// (the stationarity system is affine in the opposite coordinate); larger
// patterns use clamped Newton from an interior grid.
MixedNeResult enumerate_mixed_ne(const PotentialGame& game,
                                 const MixedNeOptions& opts = {});

struct RegularityTolerances {
  double strict = 1e-9;    // quasi-strictness margins must exceed this
  double singular = 1e-9;  // |det H| must exceed this at mixed equilibria
};

struct EquilibriumEntry {
  MixedProfile point;
  MixingPattern pattern;
  // Pure equilibria: min over players of u(a) - u(a_i', a_{-i}).
  // Mixed equilibria: min over pure-assigned players of
  // U(played, x*_{-i}) - U(other, x*_{-i}); +inf when every player mixes.
  double quasi_strict_margin = 0.0;
  std::optional<double> restricted_hessian_det;  // absent for pure equilibria
  bool regular = false;
};

struct EquilibriumReport {
  std::vector<EquilibriumEntry> pure_ne;
  std::vector<EquilibriumEntry> mixed_ne;
  bool degenerate = false;
  std::vector<std::string> degeneracy_notes;
  bool game_regular = false;
};

// Enumerates all equilibria and audits each for regularity: strictness at
// vertices, quasi-strictness plus invertible restricted Hessian elsewhere.
// Degeneracy flags from the enumeration mark the game non-regular.
EquilibriumReport audit_regularity(const PotentialGame& game,
                                   const RegularityTolerances& tols = {},
                                   const MixedNeOptions& ne_opts = {});

// First-order asymptotic predictor of the Nash distribution branch at a
// given lambda, one start per audited equilibrium: pure coordinates are set
// to the logit of their deviation margins, mixing coordinates move by
// lambda * H^{-1} logit(x*). Gives Newton a start inside its basin even
// when lambda is far below the transition width. Entries whose restricted
// Hessian is singular are skipped.
std::vector<MixedProfile> nd_predictor_starts(const PotentialGame& game,
                                              const EquilibriumReport& report,
                                              double lambda);

struct Lambda0Options {
  double lo = 1e-4;
  double hi = 1.0;
  int steps = 20;
  double pair_tol = 0.45;  // an ND must sit within this of a distinct NE
};

// Largest verified lambda (by bisection on [lo, hi]) at which the Nash
// distributions are in one-to-one correspondence with the equilibria of
// `report`, all hyperbolic, with the stable/unstable split matching
// pure/mixed. Returns 0 when even `lo` fails.
double lambda0_bisect(const PotentialGame& game,
                      const EquilibriumReport& report,
                      const Lambda0Options& opts = {},
                      const SolverOptions& solver = {},
                      const StabilityTolerances& tols = {});

}  // namespace sfp
