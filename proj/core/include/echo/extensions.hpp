#pragma once

// Model variants that reduce to the baseline game: one merged source,
// several sources per kind, source visibility ν, and M states.

#include <optional>
#include <vector>

#include "echo/attention.hpp"
#include "echo/equilibrium.hpp"

namespace echo {

struct MappedEquilibrium {
  GameConfig cfg;
  Equilibrium eqm;
};

/// Merged-source equilibrium as the equilibrium of the one-sided game in which
/// every player is type L and the merged source becomes source l.
MappedEquilibrium merge_map(const Equilibrium& merged, const GameConfig& merged_cfg);
/// Inverse of merge_map; `merged_cfg` restores the players' sides.
Equilibrium merge_unmap(const Equilibrium& one_sided, const GameConfig& merged_cfg);
/// The one-sided game of merge_map without a solution.
GameConfig one_sided_config(const GameConfig& merged_cfg);

/// Baseline game with a single source per kind.
GameConfig aggregate_config(const GameConfig& multi_cfg);
/// Sums each player's attention over the sources of each kind.
AttentionProfile split_map(const AttentionProfile& multi, const GameConfig& multi_cfg);

/// Split weights per kind; each vector is normalized. Empty means equal split.
struct SplitWeights {
  std::vector<double> left;
  std::vector<double> right;
};
/// Spreads baseline kind totals over the K1 + K2 sources of `multi_cfg`.
AttentionProfile split_inverse(const AttentionProfile& baseline, const GameConfig& multi_cfg,
                               const SplitWeights& weights = {});

/// Baseline (ν = 1) game with λ/ν, ντ and scaled floors and pairwise rows.
GameConfig rescale_visibility(const GameConfig& cfg);
/// Maps an equilibrium of rescale_visibility(cfg) back to the units of cfg.
Equilibrium rescale_back(const Equilibrium& rescaled, const GameConfig& cfg);
/// Solves the rescaled baseline game and maps every group back.
GameSolution solve_via_rescaling(const GameConfig& cfg, const SolverOptions& opts = {});

struct MStateParams {
  int M = 2;
  int N = 2;
  double lambda = 2.0;
  double tau = 1.0;
  double beta = 0.1;
};

struct MStateSolution {
  double delta_star = 0.0;
  double x_star = 0.0;  ///< each source other than the player's own-default revealing one
  double y_star = 0.0;  ///< each like-minded friend
  double z_star = 0.0;  ///< each player of another type
  double budget_residual = 0.0;
};

double m_state_g1(double x, const MStateParams& p);
double m_state_g2(double x, const MStateParams& p);

/// Throws DomainError when λ ≤ 1/(M−1) or τ ≤ (M−1)·phi(λ(M−1)).
MStateSolution solve_m_state(const MStateParams& p);

/// Attention of M·N players (type = index / N) over M sources and all players.
struct MStateProfile {
  int M = 2;
  int N = 2;
  std::vector<std::vector<double>> sources;  ///< [player][source ω]
  std::vector<std::vector<double>> peers;    ///< [receiver][sender]
};

MStateProfile m_state_profile(const MStateParams& p, const MStateSolution& s);

/// −β/M Σ_{ω≠m} P(U_i | ω) for player i of type m = i / N.
double m_state_objective(const MStateProfile& x, const MStateParams& p, int i);

/// Largest relative KKT violation over all players of their own-row problems.
double m_state_kkt_residual(const MStateProfile& x, const MStateParams& p, double zero_tol = 1e-14);

}  // namespace echo
