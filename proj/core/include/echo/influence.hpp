#pragma once

// Marginal-influence matrix of an echo chamber and the inverse of I + G.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "echo/attention.hpp"
#include "echo/equilibrium.hpp"

namespace echo {

/// e_0..e_N of g, by the product recurrence (O(N²)).
std::vector<double> elementary_symmetric(const std::vector<double>& g);

/// det(I + G) where [G]_ij = g_j off the diagonal:
/// 1 + Σ_s (−1)^{s−1}(s−1)·e_s(g).
double closed_form_det(const std::vector<double>& g);

/// Inverse of I + G from the subset-sum closed forms.
Eigen::MatrixXd closed_form_inverse(const std::vector<double>& g);

/// Same inverse by bordering: peel off the last player and apply the Schur complement.
Eigen::MatrixXd blockwise_inverse(const std::vector<double>& g);

/// I + G for column-constant influences.
Eigen::MatrixXd influence_matrix(const std::vector<double>& g);

struct InfluenceSystem {
  std::vector<std::size_t> members;  ///< global player index of each row
  std::vector<double> g;             ///< column influence g_j (column-constant case)
  Eigen::MatrixXd G;                 ///< zero diagonal
  Eigen::MatrixXd A_inv;             ///< closed form when column-constant, else numeric
  Eigen::MatrixXd A_inv_numeric;     ///< LU inverse of I + G
  double det = 1.0;
  double agreement = 0.0;  ///< sup-norm of A_inv − A_inv_numeric
  bool pairwise = false;
  /// κ_i = −∂c(x_i; λ_i)/∂λ_i per member.
  std::vector<double> kappa;
  /// Restricted to the core because some member ignores the source or a peer.
  bool restricted = false;
};

/// Builds the system on the core of `eqm`. Throws PreconditionError when a
/// core member is clamped at its floor or some g_j lies outside (0,1).
InfluenceSystem influence_system(const Equilibrium& eqm, const GameConfig& cfg);

/// Position of global player i in sys.members; throws PreconditionError if absent.
std::size_t member_position(const InfluenceSystem& sys, std::size_t i);

struct MatrixProperties {
  bool positive_diagonal = true;
  bool negative_offdiagonal = true;
  bool positive_row_sums = true;
  [[nodiscard]] bool all() const { return positive_diagonal && negative_offdiagonal && positive_row_sums; }
};
MatrixProperties check_properties(const Eigen::MatrixXd& a_inv);

}  // namespace echo
