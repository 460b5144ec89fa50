#pragma once

// Echo-chamber equilibria among like-minded players: the source-attention
// fixed point, core/periphery classification, network back-out, closed forms
// for the homogeneous case and uniqueness certificates.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "echo/attention.hpp"
#include "echo/best_response.hpp"

namespace echo {

struct SolverOptions {
  double damping = 0.5;
  double tol = 1e-12;        ///< sup-norm fixed-point residual target
  double accept_tol = 1e-10; ///< residual accepted when max_iter is exhausted
  int max_iter = 200000;
  int starts = 16;
  std::uint64_t seed = 0x5eed;
  double distinct_tol = 1e-7;  ///< fixed points farther apart than this are distinct
  /// Single warm start (used by re-solve finite differences); overrides `starts`.
  std::optional<std::vector<double>> initial;
};

/// Players solved together and the source they share.
struct Group {
  std::vector<std::size_t> members;
  SourceKind source = SourceKind::l;
};

Group side_group(const GameConfig& cfg, Side side);
/// All players around the merged source.
Group merged_group(const GameConfig& cfg);

struct SolverMeta {
  int iterations = 0;
  double residual = 0.0;
  std::string path;
  bool multiple = false;
  int starts_run = 0;
  int starts_converged = 0;
  int distinct_fixed_points = 1;
};

struct Equilibrium {
  Group group;
  /// Own-source attention per player (global index; zero outside the group).
  std::vector<double> x_source;
  /// Attention profile of the group's rows; other rows zero.
  AttentionProfile network;
  std::vector<std::size_t> core;
  std::vector<std::size_t> periphery;
  /// Bandwidth multiplier γ_i of every group member.
  std::map<std::size_t, double> multipliers;
  /// Stage-1 utility per player (global index; zero outside the group).
  std::vector<double> utilities;
  SolverMeta meta;

  [[nodiscard]] bool in_core(std::size_t i) const;
  [[nodiscard]] double total_source() const;
};

/// {i in side : τ_i > threshold} (τ̄_i in the bounded variant).
std::vector<std::size_t> potential_visible_set(const GameConfig& cfg, Side side);
std::vector<std::size_t> potential_visible_set(const GameConfig& cfg, const Group& group);

/// The map T of the source-attention system, evaluated on `members`
/// (x indexed like `members`).
std::vector<double> source_map(const GameConfig& cfg, const std::vector<std::size_t>& members,
                               const std::vector<double>& x);

/// Every distinct fixed point found, ordered by total source attention.
std::vector<Equilibrium> solve_group_all(const GameConfig& cfg, const Group& group,
                                         const SolverOptions& opts = {});
/// First equilibrium of solve_group_all; meta.multiple flags multiplicity.
Equilibrium solve_group(const GameConfig& cfg, const Group& group, const SolverOptions& opts = {});
Equilibrium solve_side(const GameConfig& cfg, Side side, const SolverOptions& opts = {});
/// solve_side for a bounded-bandwidth game; every side member needs a tau_floor.
Equilibrium solve_bounded(const GameConfig& cfg, Side side, const SolverOptions& opts = {});

/// Equilibria of every nonempty group combined into one profile.
struct GameSolution {
  std::vector<Equilibrium> groups;
  AttentionProfile profile;
};
GameSolution solve_game(const GameConfig& cfg, const SolverOptions& opts = {});

/// Unique x(N) in (phi(λ), τ) with x = τ − (N−1)·h(x; λ).
double symmetric_fixed_point(double lambda, double tau, int n);

/// True when every group member attends every other member.
bool fully_connected(const Equilibrium& eqm);
/// Closed-form utility when the group is fully connected, else direct evaluation.
double equilibrium_utility(const Equilibrium& eqm, const GameConfig& cfg, std::size_t i);
/// −β/2·exp(−ν Σ_j x_j + Σ_{j≠i} ν·threshold(λ_i^j)); valid for a fully connected group.
double closed_form_utility(const Equilibrium& eqm, const GameConfig& cfg, std::size_t i);

enum class CertificateKind {
  homogeneous_condition,
  strong_monotonicity,
  multi_start_evidence,
  no_interaction,
  none
};
std::string to_string(CertificateKind k);

struct UniquenessCertificate {
  CertificateKind kind = CertificateKind::none;
  std::string detail;
  double margin = 0.0;
  std::size_t pv_size = 0;
};

UniquenessCertificate uniqueness_certificate(const GameConfig& cfg, Side side,
                                             const SolverOptions& opts = {});

struct LargeSocietyCheck {
  bool ok = false;
  double margin = 0.0;  ///< left side minus log β
  double deviation_utility = 0.0;
  double on_path_utility = 0.0;
  double x_n = 0.0;
};

/// No-deviation test for the symmetric echo chamber against mimicking the other type.
LargeSocietyCheck large_society_check(double lambda, double tau, double beta, int n);
/// Smallest N in [2, n_max] passing large_society_check.
std::optional<int> min_large_society_size(double lambda, double tau, double beta, int n_max = 100000);

}  // namespace echo
