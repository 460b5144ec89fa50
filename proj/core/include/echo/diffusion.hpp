#pragma once

// Monte Carlo replay of the two-round news diffusion.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "echo/attention.hpp"

namespace echo {

struct SimCell {
  std::size_t player = 0;
  State state = State::L;
  std::uint64_t samples = 0;     ///< replications in which this state occurred
  std::uint64_t uninformed = 0;  ///< of those, replications with the player uninformed
  double estimate = 0.0;
  double std_error = 0.0;
  double analytic = 0.0;
  double z = 0.0;
};

struct SimReport {
  std::uint64_t draws = 0;
  std::uint64_t seed = 0;
  std::vector<SimCell> cells;          ///< player-major, states L then R
  std::vector<double> utility;         ///< estimated stage-1 utility per player
  std::vector<Plan> plans;             ///< plan recorded from the analytic profile
  std::vector<double> analytic_utility;

  [[nodiscard]] const SimCell& cell(std::size_t player, State state) const;
};

struct SimOptions {
  unsigned threads = 0;  ///< 0: hardware concurrency
};

/// Replication r uses its own SplitMix64 substream keyed by (seed, r), so the
/// result does not depend on the thread count.
SimReport simulate(const AttentionProfile& x, const GameConfig& cfg, std::uint64_t draws,
                   std::uint64_t seed, const SimOptions& opts = {});

struct Comparison {
  bool pass = true;
  double max_abs_z = 0.0;
  double coverage = 1.0;  ///< share of cells with |z| within the threshold
  std::vector<std::size_t> flagged;  ///< indices into SimReport::cells
};

Comparison compare_analytic(const SimReport& rep, double z_threshold = 4.0);

}  // namespace echo
