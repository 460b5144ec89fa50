#pragma once

// Local comparative statics of an interior echo chamber in bandwidth τ and
// visibility λ, including peripheral players and pairwise visibilities.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "echo/equilibrium.hpp"
#include "echo/influence.hpp"

namespace echo {

/// Sign pattern of a visibility perturbation, labelled by its effect on the
/// perturbed player's own-source attention: a rises, b falls, c unchanged.
enum class SignCase { a, b, c };
std::string to_string(SignCase s);

enum class Param { tau, lambda };
std::string to_string(Param p);

inline constexpr double kKappaZeroTol = 1e-12;

struct GradientReport {
  std::vector<std::size_t> members;  ///< core players, positions of the vectors below
  std::vector<double> dx_source;
  Eigen::MatrixXd dx_network;  ///< [receiver][sender] over members, zero diagonal
  double d_aggregate = 0.0;
  std::optional<SignCase> sign_case;
};

GradientReport grad_bandwidth(const InfluenceSystem& sys, std::size_t i);
GradientReport grad_visibility(const InfluenceSystem& sys, std::size_t i);

struct AggregateGradient {
  double value = 0.0;
  bool sign_guaranteed = false;
  std::string note;
};

/// ∂Σ_n x_n / ∂param_i. The sign is only guaranteed for two players or
/// homogeneous players.
AggregateGradient aggregate_attention_gradient(const InfluenceSystem& sys, const GameConfig& cfg,
                                               std::size_t i, Param param);

struct PeripheralGradients {
  std::size_t k = 0;
  std::size_t i = 0;
  double dsource_dtau = 0.0;
  double dsource_dlambda = 0.0;
  std::vector<double> dpeer_dtau;     ///< ∂x_k^j per core member j
  std::vector<double> dpeer_dlambda;  ///< ∂x_k^j per core member j
  std::vector<std::size_t> core;
};

/// Derivatives of peripheral player k with respect to τ_i and λ_i for core player i.
PeripheralGradients peripheral_gradients(const Equilibrium& eqm, const GameConfig& cfg, std::size_t k,
                                         std::size_t i);

struct PairwiseGradientReport {
  GradientReport report;
  MatrixProperties properties;
  bool assumption_holds = false;
  double kappa = 0.0;
};

/// Gradient in λ_i^j (receiver i's visibility of sender j).
PairwiseGradientReport pairwise_gradients(const Equilibrium& eqm, const GameConfig& cfg, std::size_t i,
                                          std::size_t j);

/// cfg with τ_i or λ_i shifted by `delta` (λ_i^j when `sender` is given).
GameConfig perturbed(const GameConfig& cfg, Param param, std::size_t i, double delta,
                     std::optional<std::size_t> sender = std::nullopt);

/// Centered difference of own-source attention (global indexing) from two
/// warm-started re-solves of the group.
std::vector<double> resolve_difference(const GameConfig& cfg, const Equilibrium& eqm, Param param,
                                       std::size_t i, double step = 1e-5,
                                       std::optional<std::size_t> sender = std::nullopt,
                                       SolverOptions opts = {});

/// grad_bandwidth or grad_visibility for every core member, computed in parallel.
std::vector<GradientReport> gradient_batch(const InfluenceSystem& sys, Param param);

}  // namespace echo
