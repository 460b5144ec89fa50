#include "echo/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "echo/equilibrium.hpp"

namespace echo {

namespace {

void check_domain(double lambda, int n, const char* where) {
  if (n < 2) throw DomainError(std::string(where) + ": N must be at least 2");
  const double bound = static_cast<double>(n) / static_cast<double>(n - 1);
  if (!(lambda > bound)) {
    std::ostringstream os;
    os << where << ": requires lambda > N/(N-1) = " << bound << " (got " << lambda << ")";
    throw DomainError(os.str());
  }
}

struct Transformed {
  double b, c, d;
};

Transformed transform(double a, double lambda, int n) {
  const double nn = static_cast<double>(n);
  const double gap = nn - 1.0 - a;
  return {nn * a / gap, ((lambda - 1.0) * a - 1.0) / nn, lambda * a / gap};
}

}  // namespace

double efficient_equation_lhs(double a, double lambda, int n) {
  const double nn = static_cast<double>(n);
  if (!(a < nn - 1.0)) return std::numeric_limits<double>::infinity();
  const Transformed t = transform(a, lambda, n);
  return std::log1p(a) + std::log1p(t.b) + (nn - 1.0) / lambda * std::log1p(t.c) +
         nn / lambda * std::log1p(t.d);
}

double tau_threshold(double lambda, int n) {
  check_domain(lambda, n, "tau_threshold");
  return efficient_equation_lhs(1.0 / (lambda - 1.0), lambda, n);
}

EfficientProfile solve_efficient(double lambda, double tau, int n) {
  const double threshold = tau_threshold(lambda, n);
  EfficientProfile e;
  if (!(tau > threshold)) {
    std::ostringstream os;
    os << "tau = " << tau << " does not exceed the threshold " << threshold;
    e.reason = os.str();
    return e;
  }
  // The left side increases from the threshold to +inf on the open bracket.
  double lo = 1.0 / (lambda - 1.0) + 1e-12;
  double hi = static_cast<double>(n) - 1.0 - 1e-12;
  if (efficient_equation_lhs(lo, lambda, n) >= tau) hi = lo;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (efficient_equation_lhs(mid, lambda, n) > tau)
      hi = mid;
    else
      lo = mid;
  }
  const double a = std::abs(efficient_equation_lhs(lo, lambda, n) - tau) <=
                           std::abs(efficient_equation_lhs(hi, lambda, n) - tau)
                       ? lo
                       : hi;
  const Transformed t = transform(a, lambda, n);
  e.a = a;
  e.b = t.b;
  e.c = t.c;
  e.d = t.d;
  e.x_star = std::log1p(a);
  e.y_star = std::log1p(t.b);
  e.z_star = std::log1p(t.c) / lambda;
  e.delta_star = std::log1p(t.d) / lambda;
  const double nn = static_cast<double>(n);
  e.budget_residual = e.x_star + e.y_star + (nn - 1.0) * e.z_star + nn * e.delta_star - tau;
  e.valid = e.x_star > 0.0 && e.y_star > 0.0 && e.z_star > 0.0 && e.delta_star > 0.0;
  if (!e.valid) e.reason = "bisection left the interior region";
  return e;
}

GameConfig symmetric_game(double lambda, double tau, int n, double beta) {
  GameConfig cfg;
  for (Side s : {Side::L, Side::R})
    for (int k = 0; k < n; ++k) {
      PlayerParams p;
      p.side = s;
      p.beta = beta;
      p.lambda = lambda;
      p.tau = tau;
      cfg.players.push_back(p);
    }
  return cfg;
}

AttentionProfile symmetric_profile(const GameConfig& cfg, double x, double y, double z, double delta) {
  AttentionProfile prof = AttentionProfile::zeros(cfg);
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    const Side side = cfg.players[i].side;
    const SourceKind own = own_source(cfg, side);
    prof.set_kind_total(cfg, i, own, x);
    if (!cfg.merged) prof.set_kind_total(cfg, i, own == SourceKind::l ? SourceKind::r : SourceKind::l, y);
    for (std::size_t j = 0; j < cfg.size(); ++j)
      if (j != i) prof.peer(i, j) = cfg.players[j].side == side ? z : delta;
  }
  return prof;
}

AttentionProfile symmetric_profile(const GameConfig& cfg, const EfficientProfile& e) {
  return symmetric_profile(cfg, e.x_star, e.y_star, e.z_star, e.delta_star);
}

double welfare(const AttentionProfile& x, const GameConfig& cfg) {
  double w = 0.0;
  for (std::size_t i = 0; i < cfg.size(); ++i) w += plan_utility(x, cfg, i, Plan::Default);
  return w;
}

AttentionProfile welfare_gradient(const AttentionProfile& x, const GameConfig& cfg) {
  x.validate(cfg);
  const std::size_t n = cfg.size();
  const double nu = cfg.nu;
  AttentionProfile grad(n, cfg.num_sources());
  for (std::size_t k = 0; k < n; ++k) {
    const State w = other_state(default_state(cfg.players[k].side));
    const double pk = std::exp(detail::log_uninformed_unchecked(x, cfg, k, w));
    const double scale = 0.5 * cfg.players[k].beta * pk;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = std::exp(-nu * x.active_total(cfg, i, w));
      double dlog_src = 0.0;  // ∂log P_k / ∂(attention of i to a revealing source)
      double dlog_peer = 0.0;  // ∂log P_k / ∂x_k^i
      if (i == k) {
        dlog_src = -nu;
      } else {
        const double lam = cfg.visibility(k, i);
        const double v = std::exp(-lam * x.peer(k, i));
        const double denom = u + (1.0 - u) * v;
        dlog_src = -nu * u * (1.0 - v) / denom;
        dlog_peer = -lam * (1.0 - u) * v / denom;
        grad.peer(k, i) += -scale * dlog_peer;
      }
      for (std::size_t s = 0; s < cfg.num_sources(); ++s)
        if (cfg.reveals(s, w)) grad.source(i, s) += -scale * dlog_src;
    }
  }
  return grad;
}

double planner_kkt_residual(const AttentionProfile& x, const GameConfig& cfg, double zero_tol) {
  const AttentionProfile grad = welfare_gradient(x, cfg);
  double worst = 0.0;
  for (std::size_t i = 0; i < cfg.size(); ++i) {
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
    for (std::size_t s = 0; s < cfg.num_sources(); ++s) visit(x.source(i, s), grad.source(i, s));
    for (std::size_t j = 0; j < cfg.size(); ++j)
      if (j != i) visit(x.peer(i, j), grad.peer(i, j));
    if (!(hi > 0.0)) continue;
    worst = std::max(worst, (hi - lo) / hi);
    worst = std::max(worst, (zero_max - hi) / hi);
  }
  return worst;
}

EfficiencyGap efficiency_gap(double lambda, double tau, int n, double beta) {
  EfficiencyGap g;
  g.efficient = solve_efficient(lambda, tau, n);
  if (!g.efficient.valid) throw DomainError("efficiency_gap: " + g.efficient.reason);
  const GameConfig cfg = symmetric_game(lambda, tau, n, beta);
  g.welfare_efficient = welfare(symmetric_profile(cfg, g.efficient), cfg);
  g.welfare_equilibrium = welfare(solve_game(cfg).profile, cfg);
  g.gap = g.welfare_efficient - g.welfare_equilibrium;
  g.relative = g.gap / std::abs(g.welfare_equilibrium);
  return g;
}

}  // namespace echo
