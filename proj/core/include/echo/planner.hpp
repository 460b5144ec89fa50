#pragma once

// Symmetric social-planner benchmark: efficient cross-cutting attention,
// its bandwidth threshold, utilitarian welfare and the equilibrium gap.

#include <string>

#include "echo/attention.hpp"

namespace echo {

struct EfficientProfile {
  double x_star = 0.0;      ///< own-biased source
  double y_star = 0.0;      ///< opposite source
  double z_star = 0.0;      ///< each like-minded friend
  double delta_star = 0.0;  ///< each opposite-type player
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  bool valid = false;
  std::string reason;        ///< why the interior solution does not exist
  double budget_residual = 0.0;
};

/// log(a+1) + log(b(a)+1) + ((N−1)/λ)·log(c(a)+1) + (N/λ)·log(d(a)+1).
double efficient_equation_lhs(double a, double lambda, int n);

/// Infimum bandwidth with an interior efficient profile. Needs λ > N/(N−1).
double tau_threshold(double lambda, int n);

/// Throws DomainError for N < 2 or λ ≤ N/(N−1); returns valid = false when
/// τ ≤ tau_threshold(λ, N).
EfficientProfile solve_efficient(double lambda, double tau, int n);

/// N type-L players followed by N type-R players sharing (β, λ, τ).
GameConfig symmetric_game(double lambda, double tau, int n, double beta);

/// Profile in which every player gives x to its own source, y to the other
/// source, z to each like-minded player and delta to each opposite player.
AttentionProfile symmetric_profile(const GameConfig& cfg, double x, double y, double z, double delta);
AttentionProfile symmetric_profile(const GameConfig& cfg, const EfficientProfile& e);

/// −Σ_i β_i/2·P(U_i | ω ≠ d_i): utilitarian welfare under default plans.
double welfare(const AttentionProfile& x, const GameConfig& cfg);

/// ∂welfare/∂x for every entry, counting the effect on every receiver.
AttentionProfile welfare_gradient(const AttentionProfile& x, const GameConfig& cfg);

/// Largest relative spread of the welfare gradient across a player's
/// positive entries, or excess of a zero entry over them.
double planner_kkt_residual(const AttentionProfile& x, const GameConfig& cfg, double zero_tol = 1e-14);

struct EfficiencyGap {
  double gap = 0.0;       ///< welfare(efficient) − welfare(equilibrium)
  double relative = 0.0;  ///< gap / |welfare(equilibrium)|
  double welfare_efficient = 0.0;
  double welfare_equilibrium = 0.0;
  EfficientProfile efficient;
};

EfficiencyGap efficiency_gap(double lambda, double tau, int n, double beta);

}  // namespace echo
