#pragma once

// Independent reference computations shared by the unit tests. None of
// these call into the library's numerical routines.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "echo/attention.hpp"

namespace oracle {

inline double phi(double lambda) { return std::log(lambda / (lambda - 1.0)); }
inline double h(double x, double lambda) { return std::log((lambda - 1.0) * (std::exp(x) - 1.0)) / lambda; }

/// Root of f on [lo, hi] with f(lo) < 0 < f(hi), plain bisection.
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  for (int k = 0; k < 300; ++k) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

/// x = τ − (N−1)·h(x; λ).
inline double symmetric_x(double lambda, double tau, int n) {
  return bisect([&](double x) { return x - tau + (n - 1) * h(x, lambda); }, phi(lambda), tau);
}

/// Exact P(U_i | ω) by enumerating every round-1 outcome of the other
/// players (2^(n−1) terms): i stays uninformed iff its own source channels
/// miss and no round-1 informed player reaches it.
inline double uninformed_by_enumeration(const echo::AttentionProfile& x, const echo::GameConfig& cfg,
                                        std::size_t i, echo::State omega) {
  const std::size_t n = cfg.size();
  auto miss_source = [&](std::size_t k) {
    double s = 0.0;
    for (std::size_t src = 0; src < cfg.num_sources(); ++src)
      if (cfg.reveals(src, omega)) s += x.source(k, src);
    return std::exp(-cfg.nu * s);
  };
  std::vector<std::size_t> others;
  for (std::size_t k = 0; k < n; ++k)
    if (k != i) others.push_back(k);
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << others.size()); ++mask) {
    double prob = 1.0;
    double no_relay = 1.0;
    for (std::size_t b = 0; b < others.size(); ++b) {
      const std::size_t j = others[b];
      const double m = miss_source(j);
      if (mask >> b & 1) {
        prob *= 1.0 - m;
        no_relay *= std::exp(-cfg.visibility(i, j) * x.peer(i, j));
      } else {
        prob *= m;
      }
    }
    total += prob * no_relay;
  }
  return miss_source(i) * total;
}

/// Determinant and inverse of I + G (G_ij = g_j off-diagonal) by Eigen LU.
inline Eigen::MatrixXd influence_matrix(const std::vector<double>& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) a(i, j) = g[static_cast<std::size_t>(j)];
  return a;
}

/// Generic LU in extended precision; reference for ill-conditioned draws.
struct GenericLu {
  double det;
  Eigen::MatrixXd inverse;
};
inline GenericLu generic_lu(const std::vector<double>& g) {
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const MatL a = influence_matrix(g).cast<long double>();
  const Eigen::PartialPivLU<MatL> lu(a);
  return {static_cast<double>(lu.determinant()), lu.inverse().cast<double>()};
}

/// det(I + G) from the subset formula, enumerating all 2^N subsets.
inline double subset_det(const std::vector<double>& g) {
  const std::size_t n = g.size();
  double det = 1.0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    int s = 0;
    double prod = 1.0;
    for (std::size_t k = 0; k < n; ++k)
      if (mask >> k & 1) {
        ++s;
        prod *= g[k];
      }
    if (s < 2) continue;
    det += ((s - 1) % 2 == 0 ? 1.0 : -1.0) * (s - 1) * prod;
  }
  return det;
}

inline std::int64_t binom(int n, int k) {
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline echo::GameConfig symmetric_side(double lambda, double tau, int n, double beta = 0.001) {
  echo::GameConfig cfg;
  for (int k = 0; k < n; ++k) {
    echo::PlayerParams p;
    p.lambda = lambda;
    p.tau = tau;
    p.beta = beta;
    cfg.players.push_back(p);
  }
  return cfg;
}

/// Random feasible profile: per player, Dirichlet-like split of a random
/// fraction of the budget.
inline echo::AttentionProfile random_profile(const echo::GameConfig& cfg, std::mt19937_64& rng, double fill = 1.0) {
  std::exponential_distribution<double> e(1.0);
  echo::AttentionProfile x = echo::AttentionProfile::zeros(cfg);
  const std::size_t n = cfg.size(), k = cfg.num_sources();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> w(k + n, 0.0);
    double s = 0.0;
    for (std::size_t c = 0; c < k + n; ++c) {
      if (c == k + i) continue;
      w[c] = e(rng);
      s += w[c];
    }
    for (std::size_t c = 0; c < k; ++c) x.source(i, c) = fill * cfg.players[i].tau * w[c] / s;
    for (std::size_t j = 0; j < n; ++j) x.peer(i, j) = fill * cfg.players[i].tau * w[k + j] / s;
  }
  return x;
}

}  // namespace oracle
