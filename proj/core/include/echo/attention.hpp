#pragma once

// Attention kernel: the visibility threshold / influence function family,
// disruption probabilities, uninformed-event probabilities and stage-1
// expected utilities of the two-state game.

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "echo/errors.hpp"

namespace echo {

/// Nonnegative real extended with a distinguished +infinity.
class ExtendedReal {
 public:
  static ExtendedReal finite(double v) { return ExtendedReal(v, false); }
  static ExtendedReal infinity() { return ExtendedReal(0.0, true); }

  [[nodiscard]] bool is_infinite() const { return infinite_; }
  [[nodiscard]] bool is_finite() const { return !infinite_; }
  /// Throws DomainError when infinite.
  [[nodiscard]] double value() const;

  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend std::partial_ordering operator<=>(const ExtendedReal& a, const ExtendedReal& b);
  friend bool operator==(const ExtendedReal& a, double b) { return !a.infinite_ && a.value_ == b; }
  friend std::partial_ordering operator<=>(const ExtendedReal& a, double b) {
    if (a.infinite_) return std::partial_ordering::greater;
    return a.value_ <=> b;
  }

 private:
  ExtendedReal(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

/// Visibility threshold: log(λ/(λ−1)) for λ > 1, +infinity for 0 ≤ λ ≤ 1.
ExtendedReal phi(double lambda);

/// Influence function h(x; λ) = (1/λ)·log[(λ−1)(e^x − 1)], defined for λ > 1, x ≥ phi(λ).
double h(double x, double lambda);
/// ∂h/∂x = (1/λ)·e^x/(e^x − 1); equals the one-sided limit 1 at x = phi(λ).
double h_x(double x, double lambda);
/// ∂h/∂λ = (1/λ)·[1/(λ−1) − h(x; λ)].
double h_lambda(double x, double lambda);

/// log(e^x − 1) for x > 0 without overflow.
double log_expm1(double x);

// With source visibility ν the peer equations are those of the ν = 1 game
// in rescaled units: attention νx, visibility λ/ν. The helpers below apply
// that scaling; with ν = 1 they coincide with phi/h/h_x/h_lambda.

/// Smallest source attention of a sender that makes a receiver pay attention.
ExtendedReal visibility_threshold(double lambda, double nu = 1.0);

/// Attention a receiver with bandwidth multiplier `gamma` pays to a sender of
/// visibility `lambda` whose own-source attention is `source`:
/// (1/λ)·log max{(λ/γ − 1)(e^{ν·source} − 1), 1}.
double candidate_attention(double source, double lambda, double gamma, double nu = 1.0);

/// candidate_attention at γ = ν (unconstrained receiver); h(νx; λ/ν)/ν above the threshold.
double influence(double source, double lambda, double nu = 1.0);
/// ∂influence/∂source above the threshold, in (0, 1).
double influence_slope(double source, double lambda, double nu = 1.0);
/// ∂influence/∂λ above the threshold.
double influence_lambda(double source, double lambda, double nu = 1.0);

enum class Side { L, R };
enum class State { L, R };
/// State-contingent plan for the uninformed event.
enum class Plan { Default, Contrarian };

/// l: L-biased source (reveals R), r: R-biased source (reveals L), m: merged source (reveals both).
enum class SourceKind { l, r, m };

std::string to_string(Side s);
std::string to_string(Plan p);
std::string to_string(SourceKind k);

struct PlayerParams {
  Side side = Side::L;
  double beta = 0.1;
  double lambda = 2.0;
  double tau = 1.0;
  /// Minimum attention to the own-biased source (bounded-bandwidth variant).
  std::optional<double> tau_floor;
  /// Optional row λ_i^j of this player's visibility of every player j as a
  /// receiver; empty means λ_j is used for sender j. Entry i is ignored.
  std::vector<double> pairwise_lambda;
};

struct GameConfig {
  std::vector<PlayerParams> players;
  double nu = 1.0;
  int num_states = 2;
  int k_left = 1;   ///< number of independent l-kind sources
  int k_right = 1;  ///< number of independent r-kind sources
  bool merged = false;

  [[nodiscard]] std::size_t size() const { return players.size(); }
  [[nodiscard]] std::size_t num_sources() const;
  [[nodiscard]] SourceKind source_kind(std::size_t s) const;
  [[nodiscard]] bool reveals(std::size_t s, State omega) const;
  /// Visibility of `sender` to `receiver` (pairwise when configured).
  [[nodiscard]] double visibility(std::size_t receiver, std::size_t sender) const;
  [[nodiscard]] bool has_pairwise() const;
  [[nodiscard]] std::vector<std::size_t> side_members(Side side) const;
  /// Minimum own-source attention (0 unless the bounded variant is configured).
  [[nodiscard]] double floor_of(std::size_t i) const;
  void validate() const;
};

/// Own-biased source kind for a player of `side` (m in the merged game).
SourceKind own_source(const GameConfig& cfg, Side side);
/// Source kind whose failure makes the given plan costly.
SourceKind plan_source(const GameConfig& cfg, Side side, Plan plan);
State default_state(Side side);
State other_state(State s);

/// Row-major nonnegative attention allocation: per player, attention to each
/// source slot and to every other player.
class AttentionProfile {
 public:
  AttentionProfile() = default;
  AttentionProfile(std::size_t players, std::size_t sources);
  static AttentionProfile zeros(const GameConfig& cfg);

  [[nodiscard]] std::size_t players() const { return n_; }
  [[nodiscard]] std::size_t sources() const { return k_; }

  double& source(std::size_t i, std::size_t s) { return src_[i * k_ + s]; }
  [[nodiscard]] double source(std::size_t i, std::size_t s) const { return src_[i * k_ + s]; }
  double& peer(std::size_t i, std::size_t j) { return peer_[i * n_ + j]; }
  [[nodiscard]] double peer(std::size_t i, std::size_t j) const { return peer_[i * n_ + j]; }

  [[nodiscard]] std::span<const double> source_row(std::size_t i) const {
    return {src_.data() + i * k_, k_};
  }
  [[nodiscard]] std::span<const double> peer_row(std::size_t i) const {
    return {peer_.data() + i * n_, n_};
  }

  /// Total attention of player i to sources of the given kind.
  [[nodiscard]] double kind_total(const GameConfig& cfg, std::size_t i, SourceKind kind) const;
  /// Total attention of player i to sources active in state ω.
  [[nodiscard]] double active_total(const GameConfig& cfg, std::size_t i, State omega) const;
  [[nodiscard]] double total(std::size_t i) const;
  /// Puts `amount` on the sources of `kind`, split equally, and clears other slots of that kind.
  void set_kind_total(const GameConfig& cfg, std::size_t i, SourceKind kind, double amount);

  /// Throws ValidationError on shape mismatch, negative entries, self-attention
  /// or a budget violation beyond `tol`.
  void validate(const GameConfig& cfg, double tol = 1e-9) const;

  friend bool operator==(const AttentionProfile&, const AttentionProfile&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::vector<double> src_;
  std::vector<double> peer_;
};

/// Sup-norm distance; profiles must share a shape.
double max_abs_difference(const AttentionProfile& a, const AttentionProfile& b);

/// Per (receiver, party) probability that the attention channel is disrupted.
struct DisruptionMatrix {
  std::vector<std::vector<double>> source;  ///< [i][s] = exp(−ν·x_i^s)
  std::vector<std::vector<double>> peer;    ///< [i][j] = exp(−λ_i^j·x_i^j), 1 on the diagonal
};

DisruptionMatrix disruption(const AttentionProfile& x, const GameConfig& cfg);

/// P_x(U_i | ω): probability that player i is uninformed after both rounds.
double uninformed_prob(const AttentionProfile& x, const GameConfig& cfg, std::size_t i, State omega);
/// log P_x(U_i | ω); accumulated in log space.
double log_uninformed_prob(const AttentionProfile& x, const GameConfig& cfg, std::size_t i,
                           State omega);

struct StageOneUtility {
  double value;
  Plan plan;
};

/// max{−β/2·P(U|ω≠d), −1/2·P(U|ω=d)}; ties resolve to the default plan.
StageOneUtility stage1_utility(const AttentionProfile& x, const GameConfig& cfg, std::size_t i);
/// Utility of a fixed plan.
double plan_utility(const AttentionProfile& x, const GameConfig& cfg, std::size_t i, Plan plan);

namespace detail {
// Unchecked variants used inside solvers after validation.
double log_uninformed_unchecked(const AttentionProfile& x, const GameConfig& cfg, std::size_t i,
                                State omega);
}  // namespace detail

}  // namespace echo
