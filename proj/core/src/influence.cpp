#include "echo/influence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace echo {

std::vector<double> elementary_symmetric(const std::vector<double>& g) {
  std::vector<double> e(g.size() + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    for (std::size_t s = k + 1; s >= 1; --s) e[s] += g[k] * e[s - 1];
  return e;
}

double closed_form_det(const std::vector<double>& g) {
  // 1 + Σ_s (−1)^{s−1}(s−1)e_s = P(−1) + P'(−1) with P(t) = ∏(1 + t g_k).
  // Evaluated this way every term is nonnegative, so there is no cancellation near g_k = 1.
  long double prod = 1.0L;
  for (double v : g) prod *= 1.0L - v;
  long double deriv = 0.0L;
  for (std::size_t k = 0; k < g.size(); ++k) {
    long double rest = g[k];
    for (std::size_t j = 0; j < g.size(); ++j)
      if (j != k) rest *= 1.0L - g[j];
    deriv += rest;
  }
  return static_cast<double>(prod + deriv);
}

Eigen::MatrixXd closed_form_inverse(const std::vector<double>& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  const double det = closed_form_det(g);
  const double sign = (g.size() % 2 == 0) ? -1.0 : 1.0;  // (−1)^{N−1}
  Eigen::MatrixXd inv(n, n);
  std::vector<double> rest;
  for (Eigen::Index i = 0; i < n; ++i) {
    rest.assign(g.begin(), g.end());
    rest.erase(rest.begin() + i);
    inv(i, i) = closed_form_det(rest) / det;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      double prod = 1.0;
      for (Eigen::Index k = 0; k < n; ++k)
        if (k != i && k != j) prod *= g[static_cast<std::size_t>(k)] - 1.0;
      inv(i, j) = sign * g[static_cast<std::size_t>(j)] * prod / det;
    }
  }
  return inv;
}

Eigen::MatrixXd blockwise_inverse(const std::vector<double>& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  if (n == 0) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd inv = Eigen::MatrixXd::Ones(1, 1);
  for (Eigen::Index m = 1; m < n; ++m) {
    const Eigen::VectorXd u = Eigen::VectorXd::Constant(m, g[static_cast<std::size_t>(m)]);
    Eigen::VectorXd v(m);
    for (Eigen::Index j = 0; j < m; ++j) v(j) = g[static_cast<std::size_t>(j)];
    const Eigen::VectorXd inv_u = inv * u;
    const Eigen::RowVectorXd v_inv = v.transpose() * inv;
    const double schur = 1.0 - v.dot(inv_u);
    Eigen::MatrixXd next(m + 1, m + 1);
    next.topLeftCorner(m, m) = inv + inv_u * v_inv / schur;
    next.topRightCorner(m, 1) = -inv_u / schur;
    next.bottomLeftCorner(1, m) = -v_inv / schur;
    next(m, m) = 1.0 / schur;
    inv = std::move(next);
  }
  return inv;
}

Eigen::MatrixXd influence_matrix(const std::vector<double>& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) a(i, j) = g[static_cast<std::size_t>(j)];
  return a;
}

InfluenceSystem influence_system(const Equilibrium& eqm, const GameConfig& cfg) {
  InfluenceSystem sys;
  sys.members = eqm.core;
  sys.restricted = eqm.core.size() < eqm.group.members.size();
  sys.pairwise = cfg.has_pairwise();
  if (sys.members.empty()) throw PreconditionError("influence_system: empty core");
  const double nu = cfg.nu;
  for (std::size_t i : sys.members) {
    const auto it = eqm.multipliers.find(i);
    if (it != eqm.multipliers.end() && it->second > nu * (1.0 + 1e-12))
      throw PreconditionError("influence_system: core player " + std::to_string(i) +
                              " pays no attention to the source beyond its floor");
  }

  const auto n = static_cast<Eigen::Index>(sys.members.size());
  sys.G = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const std::size_t i = sys.members[static_cast<std::size_t>(a)];
    for (Eigen::Index b = 0; b < n; ++b) {
      if (a == b) continue;
      const std::size_t j = sys.members[static_cast<std::size_t>(b)];
      const double x = eqm.x_source[j];
      const double lam = cfg.visibility(i, j);
      if (!(visibility_threshold(lam, nu) < x)) {
        std::ostringstream os;
        os << "influence_system: player " << i << " does not attend core player " << j
           << " (equilibrium not interior)";
        throw PreconditionError(os.str());
      }
      const double slope = influence_slope(x, lam, nu);
      if (!(slope > 0.0 && slope < 1.0)) {
        std::ostringstream os;
        os << "influence_system: g = " << slope << " for sender " << j << " outside (0,1)";
        throw PreconditionError(os.str());
      }
      sys.G(a, b) = slope;
    }
    sys.kappa.push_back(-influence_lambda(eqm.x_source[i], cfg.players[i].lambda, nu));
  }

  const Eigen::MatrixXd a_mat = Eigen::MatrixXd::Identity(n, n) + sys.G;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a_mat);
  sys.A_inv_numeric = lu.inverse();
  if (sys.pairwise) {
    sys.A_inv = sys.A_inv_numeric;
    sys.det = lu.determinant();
  } else {
    for (std::size_t j : sys.members) sys.g.push_back(influence_slope(eqm.x_source[j], cfg.players[j].lambda, nu));
    sys.A_inv = closed_form_inverse(sys.g);
    sys.det = closed_form_det(sys.g);
  }
  sys.agreement = (sys.A_inv - sys.A_inv_numeric).cwiseAbs().maxCoeff();
  return sys;
}

std::size_t member_position(const InfluenceSystem& sys, std::size_t i) {
  const auto it = std::find(sys.members.begin(), sys.members.end(), i);
  if (it == sys.members.end())
    throw PreconditionError("player " + std::to_string(i) + " is not in the core");
  return static_cast<std::size_t>(it - sys.members.begin());
}

MatrixProperties check_properties(const Eigen::MatrixXd& a_inv) {
  MatrixProperties p;
  for (Eigen::Index i = 0; i < a_inv.rows(); ++i) {
    if (!(a_inv(i, i) > 0.0)) p.positive_diagonal = false;
    if (!(a_inv.row(i).sum() > 0.0)) p.positive_row_sums = false;
    for (Eigen::Index j = 0; j < a_inv.cols(); ++j)
      if (i != j && !(a_inv(i, j) < 0.0)) p.negative_offdiagonal = false;
  }
  return p;
}

}  // namespace echo
