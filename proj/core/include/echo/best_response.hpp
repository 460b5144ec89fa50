#pragma once

#include <cstddef>
#include <vector>

#include "echo/attention.hpp"

namespace echo {

/// A party a player can attend to: a source slot or another player.
struct Party {
  bool is_source;
  std::size_t index;
  friend bool operator==(const Party&, const Party&) = default;
};

struct BestResponse {
  std::size_t player = 0;
  Plan plan = Plan::Default;
  std::vector<double> sources;  ///< attention per source slot
  std::vector<double> peers;    ///< attention per player (own entry 0)
  /// Bandwidth multiplier γ (≥ ν; strictly above iff the plan source gets no
  /// attention beyond the floor).
  double multiplier = 0.0;
  std::vector<Party> active_set;
  /// −log P(U_i | plan-relevant state), the concave objective maximized.
  double objective = 0.0;
  /// Expected stage-1 utility of the plan at the response.
  double utility = 0.0;
};

struct BestResponseOptions {
  double budget_tol = 1e-12;
  int max_bisections = 400;
};

/// Unique maximizer of player i's concave attention problem for `plan`,
/// holding the rows of `profile` for the other players fixed (row i ignored).
BestResponse best_response(std::size_t i, const AttentionProfile& profile, const GameConfig& cfg,
                           Plan plan, const BestResponseOptions& opts = {});

/// −log P(U_i | ω) for the plan's state when player i uses `row` against `profile`.
double plan_objective(std::size_t i, const AttentionProfile& profile, const GameConfig& cfg,
                      Plan plan);

/// Writes the response into row i of `profile`.
void apply(const BestResponse& br, AttentionProfile& profile);

struct ThresholdReport {
  std::vector<double> per_player;  ///< β̄_i
  double global = 1.0;             ///< min_i β̄_i
};

/// Preference threshold below which the default plan dominates for every player.
ThresholdReport beta_threshold(const GameConfig& cfg);

struct PlayerVerification {
  std::size_t player = 0;
  double current_utility = 0.0;
  double default_utility = 0.0;     ///< best response utility, default plan
  double contrarian_utility = 0.0;  ///< best response utility, contrarian plan
  Plan best_plan = Plan::Default;
  double profile_deviation = 0.0;  ///< sup-norm distance to the better best response
  double gain = 0.0;               ///< best utility minus current utility
};

struct VerificationReport {
  bool pass = false;
  double tol = 0.0;
  double max_profile_deviation = 0.0;
  double max_gain = 0.0;
  std::vector<PlayerVerification> players;
};

/// Recomputes both plans' best responses for every player against the rest
/// of `x` and checks that `x` already plays the better one.
VerificationReport verify_equilibrium(const AttentionProfile& x, const GameConfig& cfg,
                                      double tol = 1e-8);

}  // namespace echo
