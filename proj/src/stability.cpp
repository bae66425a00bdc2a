#include "sfp/stability.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace sfp {

static void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidInputError("lambda must be a positive real");
}

Eigen::MatrixXd jacobian(const PotentialGame& game, double lambda,
                         const MixedProfile& x) {
  check_lambda(lambda);
  const int n = game.num_players();
  if (x.size() != n) throw InvalidInputError("profile dimension mismatch");
  const MixedProfile b =
      detail::smoothed_best_response_unchecked(game, lambda, x);
  Eigen::MatrixXd df = potential_hessian(game, x);
  for (int i = 0; i < n; ++i) df.row(i) *= b[i] * (1.0 - b[i]) / lambda;
  df.diagonal().setConstant(-1.0);  // dBR_i/dx_i = 0
  return df;
}

Eigen::MatrixXd jacobian_fixed_point_blocks(const PotentialGame& game,
                                            double lambda,
                                            const MixedProfile& fixed_point,
                                            const MixingPattern& pattern) {
  check_lambda(lambda);
  const int n = game.num_players();
  if (fixed_point.size() != n || static_cast<int>(pattern.size()) != n)
    throw InvalidInputError("dimension mismatch");

  std::vector<int> order;  // mixing players first, then pure, each in index order
  for (int i = 0; i < n; ++i)
    if (pattern[i] == PlayerRole::Mixing) order.push_back(i);
  const int m = static_cast<int>(order.size());
  for (int i = 0; i < n; ++i)
    if (pattern[i] != PlayerRole::Mixing) order.push_back(i);

  const Eigen::MatrixXd hess = potential_hessian(game, fixed_point);
  Eigen::MatrixXd permuted(n, n);
  for (int a = 0; a < n; ++a) {
    const int i = order[a];
    const double r = fixed_point[i] * (1.0 - fixed_point[i]);
    for (int b = 0; b < n; ++b) {
      // a < m, b < m: R H block; the rest are the row-weighted B / C blocks.
      permuted(a, b) = r * hess(i, order[b]);
    }
  }
  (void)m;
  Eigen::MatrixXd df(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      df(order[a], order[b]) =
          permuted(a, b) / lambda - (order[a] == order[b] ? 1.0 : 0.0);
  return df;
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw InvalidInputError("matrix must be square");
  if (m.rows() > PotentialGame::kMaxPlayers)
    throw InvalidInputError("eigenvalue dimension cap is 24");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  std::vector<std::complex<double>> eigs(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) eigs[i] = solver.eigenvalues()[i];
  std::sort(eigs.begin(), eigs.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              if (a.real() != b.real()) return a.real() > b.real();
              return a.imag() > b.imag();
            });
  return eigs;
}

StabilityClass RestPointClassification::label() const {
  if (!hyperbolic) return StabilityClass::NonHyperbolic;
  return linearly_stable ? StabilityClass::Stable : StabilityClass::Unstable;
}

RestPointClassification classify_rest_point(const PotentialGame& game,
                                            double lambda,
                                            const MixedProfile& x,
                                            const StabilityTolerances& tols) {
  check_lambda(lambda);
  if (x.size() != game.num_players())
    throw InvalidInputError("profile dimension mismatch");
  const double residual =
      (detail::smoothed_best_response_unchecked(game, lambda, x) - x)
          .cwiseAbs()
          .maxCoeff();
  if (residual > tols.rest_point_residual)
    throw NotARestPointError("fixed-point residual " +
                             std::to_string(residual) +
                             " exceeds the rest-point tolerance");

  RestPointClassification out;
  out.eigenvalues = eigenvalues(jacobian(game, lambda, x));
  double min_abs = std::numeric_limits<double>::infinity();
  double rho = 0.0;
  out.spectral_margin = -std::numeric_limits<double>::infinity();
  for (const auto& e : out.eigenvalues) {
    min_abs = std::min(min_abs, std::abs(e));
    rho = std::max(rho, std::abs(e));
    out.spectral_margin = std::max(out.spectral_margin, e.real());
  }
  out.hyperbolic = min_abs > tols.singular * (1.0 + rho);
  out.linearly_stable = out.spectral_margin < -tols.margin;
  return out;
}

std::vector<MixedProfile> enumerate_pure_ne(const PotentialGame& game) {
  const int n = game.num_players();
  std::vector<MixedProfile> out;
  for (std::uint32_t v = 0; v < game.num_profiles(); ++v) {
    bool is_ne = true;
    for (int i = 0; i < n && is_ne; ++i)
      if (game.payoff(v) < game.payoff(v ^ (1u << i))) is_ne = false;
    if (!is_ne) continue;
    MixedProfile x(n);
    for (int i = 0; i < n; ++i) x[i] = ((v >> i) & 1u) ? 0.0 : 1.0;
    out.push_back(std::move(x));
  }
  std::sort(out.begin(), out.end(),
            [](const MixedProfile& a, const MixedProfile& b) {
              return std::lexicographical_compare(a.data(), a.data() + a.size(),
                                                  b.data(), b.data() + b.size());
            });
  return out;
}

namespace {

// Assemble a full profile from a pattern and values for the mixing slots.
MixedProfile assemble(const MixingPattern& pattern,
                      const Eigen::VectorXd& mixing_values) {
  MixedProfile x(static_cast<Eigen::Index>(pattern.size()));
  int k = 0;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    switch (pattern[i]) {
      case PlayerRole::Mixing: x[i] = mixing_values[k++]; break;
      case PlayerRole::PureAction1: x[i] = 1.0; break;
      case PlayerRole::PureAction2: x[i] = 0.0; break;
    }
  }
  return x;
}

// Deviation margin of the pure-assigned players: min over them of
// U(played, x_{-i}) - U(other, x_{-i}). +inf when every player mixes.
double pure_player_margin(const PotentialGame& game, const MixedProfile& x,
                          const MixingPattern& pattern) {
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == PlayerRole::Mixing) continue;
    const double d =
        detail::pinned_difference_unchecked(game, static_cast<int>(i), x);
    margin = std::min(margin,
                      pattern[i] == PlayerRole::PureAction1 ? d : -d);
  }
  return margin;
}

bool lex_less(const MixedProfile& a, const MixedProfile& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                      b.data() + b.size());
}

}  // namespace

MixedNeResult enumerate_mixed_ne(const PotentialGame& game,
                                 const MixedNeOptions& opts) {
  const int n = game.num_players();
  if (n > 8)
    throw InvalidInputError("mixed-equilibrium enumeration is capped at 8 players");
  MixedNeResult result;

  std::uint64_t pattern_count = 1;
  for (int i = 0; i < n; ++i) pattern_count *= 3;

  for (std::uint64_t code = 0; code < pattern_count; ++code) {
    MixingPattern pattern(n);
    std::uint64_t c = code;
    std::vector<int> mixing;
    for (int i = 0; i < n; ++i, c /= 3) {
      switch (c % 3) {
        case 0: pattern[i] = PlayerRole::Mixing; mixing.push_back(i); break;
        case 1: pattern[i] = PlayerRole::PureAction1; break;
        default: pattern[i] = PlayerRole::PureAction2; break;
      }
    }
    const int nm = static_cast<int>(mixing.size());
    if (nm == 0) continue;

    if (nm == 1) {
      // dU/dx_i is constant in x_i: either no interior solution or a
      // continuum of them.
      const MixedProfile x = assemble(pattern, Eigen::VectorXd::Constant(1, 0.5));
      const double c0 = detail::pinned_difference_unchecked(game, mixing[0], x);
      if (std::abs(c0) <= opts.degeneracy_tol) {
        result.degenerate = true;
        result.degeneracy_notes.push_back(
            "player " + std::to_string(mixing[0]) +
            " indifferent on a continuum (pattern " +
            pattern_to_string(pattern) + ")");
      }
      continue;
    }

    std::vector<Eigen::VectorXd> candidates;
    if (nm == 2) {
      // Stationarity of player i is affine in the other mixing coordinate:
      //   dU/dx_i = c_i + H_ij x_j, so the candidate is unique when H_ij != 0.
      const int i = mixing[0], j = mixing[1];
      MixedProfile x0 = assemble(pattern, Eigen::VectorXd::Zero(2));
      const double ci = detail::pinned_difference_unchecked(game, i, x0);
      const double cj = detail::pinned_difference_unchecked(game, j, x0);
      const double hij = potential_hessian(game, x0)(i, j);
      if (std::abs(hij) <= opts.degeneracy_tol) {
        if (std::abs(ci) <= opts.degeneracy_tol &&
            std::abs(cj) <= opts.degeneracy_tol) {
          result.degenerate = true;
          result.degeneracy_notes.push_back(
              "flat stationarity plane (pattern " + pattern_to_string(pattern) +
              ")");
        }
        continue;
      }
      Eigen::VectorXd y(2);
      y[0] = -cj / hij;  // x_i from player j's indifference
      y[1] = -ci / hij;  // x_j from player i's indifference
      candidates.push_back(y);
    } else {
      // Newton from an interior grid on the mixing coordinates.
      int g = std::max(2, opts.grid);
      while (g > 2 && std::pow(static_cast<double>(g), nm) >
                          static_cast<double>(opts.max_starts))
        --g;
      std::vector<int> idx(nm, 0);
      while (true) {
        Eigen::VectorXd y(nm);
        for (int k = 0; k < nm; ++k) y[k] = (idx[k] + 0.5) / g;
        for (int it = 0; it < opts.newton_max_iters; ++it) {
          const MixedProfile x = assemble(pattern, y);
          Eigen::VectorXd res(nm);
          for (int k = 0; k < nm; ++k)
            res[k] = detail::pinned_difference_unchecked(game, mixing[k], x);
          if (res.cwiseAbs().maxCoeff() <= opts.residual_tol) {
            candidates.push_back(y);
            break;
          }
          const Eigen::MatrixXd h = restricted_hessian(game, x, pattern);
          const Eigen::VectorXd step = h.partialPivLu().solve(-res);
          if (!step.allFinite()) break;
          y += step;
          for (int k = 0; k < nm; ++k) y[k] = std::clamp(y[k], 1e-9, 1.0 - 1e-9);
        }
        int carry = 0;
        while (carry < nm && ++idx[carry] == g) idx[carry++] = 0;
        if (carry == nm) break;
      }
    }

    for (const Eigen::VectorXd& y : candidates) {
      bool interior = true;
      for (int k = 0; k < nm; ++k)
        if (!(y[k] > opts.interior_eps && y[k] < 1.0 - opts.interior_eps))
          interior = false;
      if (!interior) continue;
      const MixedProfile x = assemble(pattern, y);
      // Mixing players must be stationary; exact for the affine case.
      bool stationary = true;
      for (int k = 0; k < nm; ++k)
        if (std::abs(detail::pinned_difference_unchecked(game, mixing[k], x)) >
            opts.ne_tol)
          stationary = false;
      if (!stationary) continue;
      if (pure_player_margin(game, x, pattern) < -opts.ne_tol) continue;
      bool dup = false;
      for (const MixedEquilibrium& e : result.equilibria)
        if (e.pattern == pattern &&
            sup_distance(e.point, x) <= opts.dedup_radius)
          dup = true;
      if (!dup) result.equilibria.push_back({x, pattern});
    }
  }

  std::sort(result.equilibria.begin(), result.equilibria.end(),
            [](const MixedEquilibrium& a, const MixedEquilibrium& b) {
              return lex_less(a.point, b.point);
            });
  return result;
}

EquilibriumReport audit_regularity(const PotentialGame& game,
                                   const RegularityTolerances& tols,
                                   const MixedNeOptions& ne_opts) {
  const int n = game.num_players();
  EquilibriumReport report;

  for (const MixedProfile& x : enumerate_pure_ne(game)) {
    std::uint32_t v = 0;
    MixingPattern pattern(n);
    for (int i = 0; i < n; ++i) {
      if (x[i] == 0.0) v |= (1u << i);
      pattern[i] = x[i] == 1.0 ? PlayerRole::PureAction1 : PlayerRole::PureAction2;
    }
    EquilibriumEntry entry;
    entry.point = x;
    entry.pattern = std::move(pattern);
    entry.quasi_strict_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      entry.quasi_strict_margin =
          std::min(entry.quasi_strict_margin,
                   game.payoff(v) - game.payoff(v ^ (1u << i)));
    entry.regular = entry.quasi_strict_margin > tols.strict;
    report.pure_ne.push_back(std::move(entry));
  }

  MixedNeResult mixed = enumerate_mixed_ne(game, ne_opts);
  report.degenerate = mixed.degenerate;
  report.degeneracy_notes = std::move(mixed.degeneracy_notes);
  for (MixedEquilibrium& e : mixed.equilibria) {
    EquilibriumEntry entry;
    entry.quasi_strict_margin = pure_player_margin(game, e.point, e.pattern);
    entry.restricted_hessian_det =
        restricted_hessian(game, e.point, e.pattern).determinant();
    entry.regular = entry.quasi_strict_margin > tols.strict &&
                    std::abs(*entry.restricted_hessian_det) > tols.singular;
    entry.point = std::move(e.point);
    entry.pattern = std::move(e.pattern);
    report.mixed_ne.push_back(std::move(entry));
  }

  report.game_regular = !report.degenerate;
  for (const auto& e : report.pure_ne) report.game_regular &= e.regular;
  for (const auto& e : report.mixed_ne) report.game_regular &= e.regular;
  return report;
}

std::vector<MixedProfile> nd_predictor_starts(const PotentialGame& game,
                                              const EquilibriumReport& report,
                                              double lambda) {
  check_lambda(lambda);
  std::vector<const EquilibriumEntry*> entries;
  for (const auto& e : report.pure_ne) entries.push_back(&e);
  for (const auto& e : report.mixed_ne) entries.push_back(&e);

  std::vector<MixedProfile> starts;
  for (const auto* entry : entries) {
    MixedProfile x = entry->point;
    std::vector<int> mixing;
    for (int i = 0; i < game.num_players(); ++i)
      if (entry->pattern[i] == PlayerRole::Mixing) mixing.push_back(i);

    if (!mixing.empty()) {
      const Eigen::MatrixXd h = restricted_hessian(game, x, entry->pattern);
      Eigen::VectorXd z(mixing.size());
      for (std::size_t k = 0; k < mixing.size(); ++k)
        z[k] = std::log(x[mixing[k]] / (1.0 - x[mixing[k]]));
      const Eigen::VectorXd delta = lambda * h.partialPivLu().solve(z);
      if (!delta.allFinite()) continue;
      for (std::size_t k = 0; k < mixing.size(); ++k)
        x[mixing[k]] = std::clamp(x[mixing[k]] + delta[k], 1e-9, 1.0 - 1e-9);
    }
    // Pure coordinates: the branch sits at the logit of the margin.
    for (int i = 0; i < game.num_players(); ++i)
      if (entry->pattern[i] != PlayerRole::Mixing)
        x[i] = logistic(detail::pinned_difference_unchecked(game, i, x) / lambda);
    starts.push_back(std::move(x));
  }
  return starts;
}

namespace {

bool correspondence_holds(const PotentialGame& game,
                          const EquilibriumReport& report, double lambda,
                          const SolverOptions& solver,
                          const StabilityTolerances& tols, double pair_tol) {
  std::vector<const EquilibriumEntry*> nes;
  for (const auto& e : report.pure_ne) nes.push_back(&e);
  for (const auto& e : report.mixed_ne) nes.push_back(&e);
  if (nes.empty()) return false;

  SolverOptions opts = solver;
  opts.classify = false;
  for (const auto* e : nes) opts.extra_starts.push_back(e->point);
  for (MixedProfile& p : nd_predictor_starts(game, report, lambda))
    opts.extra_starts.push_back(std::move(p));

  std::vector<NashDistribution> nds;
  try {
    nds = solve_nash_distributions(game, lambda, opts);
  } catch (const NoFixedPointError&) {
    return false;
  }
  if (nds.size() != nes.size()) return false;

  std::vector<bool> used(nes.size(), false);
  for (const NashDistribution& nd : nds) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < nes.size(); ++k) {
      const double d = sup_distance(nd.point, nes[k]->point);
      if (d < best_d) { best_d = d; best = static_cast<int>(k); }
    }
    if (best < 0 || best_d > pair_tol || used[best]) return false;
    used[best] = true;
    RestPointClassification cls;
    try {
      cls = classify_rest_point(game, lambda, nd.point, tols);
    } catch (const NotARestPointError&) {
      return false;
    }
    if (!cls.hyperbolic) return false;
    const bool paired_pure = mixing_count(nes[best]->pattern) == 0;
    if (paired_pure != cls.linearly_stable) return false;
  }
  return true;
}

}  // namespace

double lambda0_bisect(const PotentialGame& game,
                      const EquilibriumReport& report,
                      const Lambda0Options& opts, const SolverOptions& solver,
                      const StabilityTolerances& tols) {
  if (!(opts.lo > 0.0) || !(opts.hi > opts.lo))
    throw InvalidInputError("bisection bracket must satisfy 0 < lo < hi");
  if (correspondence_holds(game, report, opts.hi, solver, tols, opts.pair_tol))
    return opts.hi;
  if (!correspondence_holds(game, report, opts.lo, solver, tols, opts.pair_tol))
    return 0.0;
  double good = opts.lo, bad = opts.hi;
  for (int i = 0; i < opts.steps; ++i) {
    const double mid = 0.5 * (good + bad);
    if (correspondence_holds(game, report, mid, solver, tols, opts.pair_tol))
      good = mid;
    else
      bad = mid;
  }
  return good;
}

}  // namespace sfp
