#include "echo/extensions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace echo {

namespace {

AttentionProfile scaled(const AttentionProfile& p, double factor) {
  AttentionProfile out(p.players(), p.sources());
  for (std::size_t i = 0; i < p.players(); ++i) {
    for (std::size_t s = 0; s < p.sources(); ++s) out.source(i, s) = p.source(i, s) * factor;
    for (std::size_t j = 0; j < p.players(); ++j) out.peer(i, j) = p.peer(i, j) * factor;
  }
  return out;
}

void copy_peers(const AttentionProfile& from, AttentionProfile& to) {
  for (std::size_t i = 0; i < from.players(); ++i)
    for (std::size_t j = 0; j < from.players(); ++j) to.peer(i, j) = from.peer(i, j);
}

void refresh_utilities(Equilibrium& e, const GameConfig& cfg) {
  e.utilities.assign(cfg.size(), 0.0);
  for (std::size_t i : e.group.members) e.utilities[i] = stage1_utility(e.network, cfg, i).value;
}

std::vector<double> normalized(std::vector<double> w, int k, const char* which) {
  if (w.empty()) return std::vector<double>(static_cast<std::size_t>(k), 1.0 / k);
  if (w.size() != static_cast<std::size_t>(k))
    throw ValidationError(std::string("split_inverse: ") + which + " weights need one entry per source");
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= 0.0)) throw ValidationError(std::string("split_inverse: negative ") + which + " weight");
    sum += v;
  }
  if (!(sum > 0.0)) throw ValidationError(std::string("split_inverse: ") + which + " weights sum to zero");
  for (double& v : w) v /= sum;
  return w;
}

}  // namespace

GameConfig one_sided_config(const GameConfig& merged_cfg) {
  if (!merged_cfg.merged) throw ValidationError("one_sided_config: game is not merged");
  GameConfig c = merged_cfg;
  c.merged = false;
  c.k_left = 1;
  c.k_right = 1;
  for (PlayerParams& p : c.players) p.side = Side::L;
  return c;
}

MappedEquilibrium merge_map(const Equilibrium& merged, const GameConfig& merged_cfg) {
  MappedEquilibrium out;
  out.cfg = one_sided_config(merged_cfg);
  out.eqm = merged;
  out.eqm.group.source = SourceKind::l;
  out.eqm.network = AttentionProfile::zeros(out.cfg);
  for (std::size_t i = 0; i < merged_cfg.size(); ++i)
    out.eqm.network.set_kind_total(out.cfg, i, SourceKind::l, merged.network.kind_total(merged_cfg, i, SourceKind::m));
  copy_peers(merged.network, out.eqm.network);
  refresh_utilities(out.eqm, out.cfg);
  return out;
}

Equilibrium merge_unmap(const Equilibrium& one_sided, const GameConfig& merged_cfg) {
  const GameConfig os = one_sided_config(merged_cfg);
  Equilibrium e = one_sided;
  e.group.source = SourceKind::m;
  e.network = AttentionProfile::zeros(merged_cfg);
  for (std::size_t i = 0; i < merged_cfg.size(); ++i)
    e.network.set_kind_total(merged_cfg, i, SourceKind::m, one_sided.network.kind_total(os, i, SourceKind::l));
  copy_peers(one_sided.network, e.network);
  refresh_utilities(e, merged_cfg);
  return e;
}

GameConfig aggregate_config(const GameConfig& multi_cfg) {
  GameConfig c = multi_cfg;
  c.k_left = 1;
  c.k_right = 1;
  return c;
}

AttentionProfile split_map(const AttentionProfile& multi, const GameConfig& multi_cfg) {
  multi.validate(multi_cfg);
  const GameConfig base = aggregate_config(multi_cfg);
  AttentionProfile out = AttentionProfile::zeros(base);
  for (std::size_t i = 0; i < multi_cfg.size(); ++i) {
    if (multi_cfg.merged) {
      out.source(i, 0) = multi.source(i, 0);
    } else {
      out.set_kind_total(base, i, SourceKind::l, multi.kind_total(multi_cfg, i, SourceKind::l));
      out.set_kind_total(base, i, SourceKind::r, multi.kind_total(multi_cfg, i, SourceKind::r));
    }
  }
  copy_peers(multi, out);
  return out;
}

AttentionProfile split_inverse(const AttentionProfile& baseline, const GameConfig& multi_cfg,
                               const SplitWeights& weights) {
  const GameConfig base = aggregate_config(multi_cfg);
  baseline.validate(base);
  AttentionProfile out = AttentionProfile::zeros(multi_cfg);
  copy_peers(baseline, out);
  if (multi_cfg.merged) {
    for (std::size_t i = 0; i < multi_cfg.size(); ++i) out.source(i, 0) = baseline.source(i, 0);
    return out;
  }
  const std::vector<double> wl = normalized(weights.left, multi_cfg.k_left, "left");
  const std::vector<double> wr = normalized(weights.right, multi_cfg.k_right, "right");
  const auto kl = static_cast<std::size_t>(multi_cfg.k_left);
  for (std::size_t i = 0; i < multi_cfg.size(); ++i) {
    const double l = baseline.kind_total(base, i, SourceKind::l);
    const double r = baseline.kind_total(base, i, SourceKind::r);
    for (std::size_t s = 0; s < multi_cfg.num_sources(); ++s)
      out.source(i, s) = s < kl ? l * wl[s] : r * wr[s - kl];
  }
  return out;
}

GameConfig rescale_visibility(const GameConfig& cfg) {
  if (!(cfg.nu > 0.0)) throw DomainError("rescale_visibility: nu must be positive");
  const double nu = cfg.nu;
  GameConfig c = cfg;
  c.nu = 1.0;
  for (PlayerParams& p : c.players) {
    p.lambda /= nu;
    p.tau *= nu;
    if (p.tau_floor) *p.tau_floor *= nu;
    for (double& l : p.pairwise_lambda) l /= nu;
  }
  return c;
}

Equilibrium rescale_back(const Equilibrium& rescaled, const GameConfig& cfg) {
  const double nu = cfg.nu;
  Equilibrium e = rescaled;
  for (double& x : e.x_source) x /= nu;
  e.network = scaled(rescaled.network, 1.0 / nu);
  for (auto& [i, g] : e.multipliers) g *= nu;
  return e;
}

GameSolution solve_via_rescaling(const GameConfig& cfg, const SolverOptions& opts) {
  const GameSolution base = solve_game(rescale_visibility(cfg), opts);
  GameSolution out;
  out.profile = scaled(base.profile, 1.0 / cfg.nu);
  for (const Equilibrium& e : base.groups) out.groups.push_back(rescale_back(e, cfg));
  return out;
}

double m_state_g1(double x, const MStateParams& p) {
  const double k = p.lambda * (p.M - 1) - 1.0;
  return std::log(std::max(k * std::expm1(x), 1.0)) / p.lambda;
}

double m_state_g2(double x, const MStateParams& p) {
  const double k = p.lambda * (p.M - 2) - 1.0;
  return std::log(std::max(k * std::expm1(x), 1.0)) / p.lambda;
}

MStateSolution solve_m_state(const MStateParams& p) {
  if (p.M < 2) throw DomainError("solve_m_state: M must be at least 2");
  if (p.N < 2) throw DomainError("solve_m_state: N must be at least 2");
  if (!(p.beta > 0.0 && p.beta < 1.0)) throw DomainError("solve_m_state: beta must lie in (0,1)");
  const double m1 = static_cast<double>(p.M - 1);
  if (!(p.lambda > 1.0 / m1)) {
    std::ostringstream os;
    os << "solve_m_state: requires lambda > 1/(M-1) = " << 1.0 / m1;
    throw DomainError(os.str());
  }
  const double bound = m1 * phi(p.lambda * m1).value();
  if (!(p.tau > bound)) {
    std::ostringstream os;
    os << "solve_m_state: requires tau > (M-1)·phi(lambda(M-1)) = " << bound;
    throw DomainError(os.str());
  }
  const double nn = static_cast<double>(p.N);
  auto excess = [&](double x) {
    return m1 * x + (nn - 1.0) * m_state_g1(x, p) + m1 * nn * m_state_g2(x, p) - p.tau;
  };
  double lo = 0.0;
  double hi = p.tau / m1;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (excess(mid) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  MStateSolution s;
  s.x_star = std::abs(excess(lo)) <= std::abs(excess(hi)) ? lo : hi;
  s.y_star = m_state_g1(s.x_star, p);
  s.z_star = m_state_g2(s.x_star, p);
  s.delta_star = 0.0;
  s.budget_residual = excess(s.x_star);
  if (!(s.y_star > s.z_star))
    throw SolverError("solve_m_state: solution is not a generalized echo chamber (y* <= z*)");
  return s;
}

MStateProfile m_state_profile(const MStateParams& p, const MStateSolution& s) {
  MStateProfile x;
  x.M = p.M;
  x.N = p.N;
  const auto players = static_cast<std::size_t>(p.M * p.N);
  x.sources.assign(players, std::vector<double>(static_cast<std::size_t>(p.M), s.x_star));
  x.peers.assign(players, std::vector<double>(players, s.z_star));
  for (std::size_t i = 0; i < players; ++i) {
    const auto m = i / static_cast<std::size_t>(p.N);
    x.sources[i][m] = s.delta_star;
    for (std::size_t j = 0; j < players; ++j)
      if (j / static_cast<std::size_t>(p.N) == m) x.peers[i][j] = s.y_star;
    x.peers[i][i] = 0.0;
  }
  return x;
}

namespace {

double log_p_state(const MStateProfile& x, const MStateParams& p, std::size_t i, std::size_t w) {
  double lp = -x.sources[i][w];
  for (std::size_t j = 0; j < x.sources.size(); ++j) {
    if (j == i) continue;
    const double u = std::exp(-x.sources[j][w]);
    const double v = std::exp(-p.lambda * x.peers[i][j]);
    lp += std::log(u + (1.0 - u) * v);
  }
  return lp;
}

}  // namespace

double m_state_objective(const MStateProfile& x, const MStateParams& p, int i) {
  const auto ii = static_cast<std::size_t>(i);
  const auto m = ii / static_cast<std::size_t>(p.N);
  double sum = 0.0;
  for (std::size_t w = 0; w < static_cast<std::size_t>(p.M); ++w)
    if (w != m) sum += std::exp(log_p_state(x, p, ii, w));
  return -p.beta / p.M * sum;
}

double m_state_kkt_residual(const MStateProfile& x, const MStateParams& p, double zero_tol) {
  const std::size_t players = x.sources.size();
  const auto M = static_cast<std::size_t>(p.M);
  double worst = 0.0;
  for (std::size_t i = 0; i < players; ++i) {
    const std::size_t m = i / static_cast<std::size_t>(p.N);
    std::vector<double> g_src(M, 0.0);
    std::vector<double> g_peer(players, 0.0);
    for (std::size_t w = 0; w < M; ++w) {
      if (w == m) continue;
      const double pw = p.beta / p.M * std::exp(log_p_state(x, p, i, w));
      g_src[w] += pw;
      for (std::size_t j = 0; j < players; ++j) {
        if (j == i) continue;
        const double u = std::exp(-x.sources[j][w]);
        const double v = std::exp(-p.lambda * x.peers[i][j]);
        g_peer[j] += pw * p.lambda * (1.0 - u) * v / (u + (1.0 - u) * v);
      }
    }
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    double zero_max = -std::numeric_limits<double>::infinity();
    auto visit = [&](double value, double g) {
      if (value > zero_tol) {
        hi = std::max(hi, g);
        lo = std::min(lo, g);
      } else {
        zero_max = std::max(zero_max, g);
      }
    };
    for (std::size_t w = 0; w < M; ++w) visit(x.sources[i][w], g_src[w]);
    for (std::size_t j = 0; j < players; ++j)
      if (j != i) visit(x.peers[i][j], g_peer[j]);
    if (!(hi > 0.0)) continue;
    worst = std::max({worst, (hi - lo) / hi, (zero_max - hi) / hi});
  }
  return worst;
}

}  // namespace echo
