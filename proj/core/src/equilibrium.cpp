#include "echo/equilibrium.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "echo/rng.hpp"

namespace echo {

bool Equilibrium::in_core(std::size_t i) const {
  return std::find(core.begin(), core.end(), i) != core.end();
}

double Equilibrium::total_source() const {
  double s = 0.0;
  for (std::size_t i : group.members) s += x_source[i];
  return s;
}

Group side_group(const GameConfig& cfg, Side side) {
  return {cfg.side_members(side), own_source(cfg, side)};
}

Group merged_group(const GameConfig& cfg) {
  Group g;
  g.members.resize(cfg.size());
  std::iota(g.members.begin(), g.members.end(), std::size_t{0});
  g.source = SourceKind::m;
  return g;
}

namespace {

// Smallest visibility threshold sender j faces among the other members.
ExtendedReal sender_threshold(const GameConfig& cfg, const std::vector<std::size_t>& members,
                              std::size_t j) {
  ExtendedReal best = ExtendedReal::infinity();
  for (std::size_t a : members) {
    if (a == j) continue;
    const ExtendedReal t = visibility_threshold(cfg.visibility(a, j), cfg.nu);
    if (t < best) best = t;
  }
  return best;
}

double sup_norm_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double residual(const GameConfig& cfg, const std::vector<std::size_t>& members,
                const std::vector<double>& x) {
  return sup_norm_diff(source_map(cfg, members, x), x);
}

struct StartResult {
  bool converged = false;
  std::vector<double> x;
  double residual = 0.0;
  int iterations = 0;
  bool used_newton = false;
  std::vector<double> trace;
};

// One Newton step on F(x) = x − T(x) with the piecewise Jacobian I + G.
std::vector<double> newton_step(const GameConfig& cfg, const std::vector<std::size_t>& members,
                                const std::vector<double>& x) {
  const std::size_t n = members.size();
  const std::vector<double> t = source_map(cfg, members, x);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                  static_cast<Eigen::Index>(n));
  Eigen::VectorXd f(static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t i = members[a];
    f(static_cast<Eigen::Index>(a)) = x[a] - t[a];
    const bool clamped = t[a] <= cfg.floor_of(i);
    if (clamped) continue;
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a) continue;
      const double lam = cfg.visibility(i, members[b]);
      if (influence(x[b], lam, cfg.nu) > 0.0)
        jac(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            influence_slope(x[b], lam, cfg.nu);
    }
  }
  const Eigen::VectorXd step = jac.partialPivLu().solve(-f);
  std::vector<double> out(n);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t i = members[a];
    out[a] = std::clamp(x[a] + step(static_cast<Eigen::Index>(a)), cfg.floor_of(i),
                        cfg.players[i].tau);
  }
  return out;
}

StartResult run_start(const GameConfig& cfg, const std::vector<std::size_t>& members,
                      std::vector<double> x, const SolverOptions& opts) {
  StartResult res;
  double r = residual(cfg, members, x);
  double alpha = opts.damping;
  int streak = 0;
  for (int it = 0; it < opts.max_iter; ++it) {
    res.iterations = it;
    if (r <= opts.tol) break;
    if (r < 1e-3) {
      const std::vector<double> xn = newton_step(cfg, members, x);
      const double rn = residual(cfg, members, xn);
      if (rn < 0.5 * r) {
        x = xn;
        r = rn;
        res.used_newton = true;
        res.trace.push_back(r);
        continue;
      }
    }
    const std::vector<double> t = source_map(cfg, members, x);
    for (std::size_t a = 0; a < x.size(); ++a) x[a] += alpha * (t[a] - x[a]);
    const double rn = residual(cfg, members, x);
    if (rn > r) {
      alpha = std::max(alpha * 0.5, 1e-4);
      streak = 0;
    } else if (++streak >= 20 && alpha < opts.damping) {
      alpha = std::min(opts.damping, alpha * 1.25);
      streak = 0;
    }
    r = rn;
    res.trace.push_back(r);
  }
  res.x = std::move(x);
  res.residual = r;
  res.converged = r <= opts.accept_tol;
  return res;
}

std::string trace_summary(const std::vector<double>& trace) {
  std::ostringstream os;
  const std::size_t first = trace.size() > 8 ? trace.size() - 8 : 0;
  for (std::size_t k = first; k < trace.size(); ++k) os << (k == first ? "" : ", ") << trace[k];
  return os.str();
}

Equilibrium back_out(const GameConfig& cfg, const Group& group, const std::vector<std::size_t>& pv,
                     const std::vector<double>& x_pv) {
  Equilibrium eq;
  eq.group = group;
  eq.x_source.assign(cfg.size(), 0.0);
  eq.utilities.assign(cfg.size(), 0.0);
  eq.network = AttentionProfile::zeros(cfg);

  AttentionProfile senders = AttentionProfile::zeros(cfg);
  for (std::size_t a = 0; a < pv.size(); ++a) senders.set_kind_total(cfg, pv[a], group.source, x_pv[a]);

  for (std::size_t k : group.members) {
    const BestResponse br = best_response(k, senders, cfg, Plan::Default);
    apply(br, eq.network);
    eq.x_source[k] = eq.network.kind_total(cfg, k, group.source);
    eq.multipliers[k] = br.multiplier;
  }
  for (std::size_t k : group.members) {
    if (eq.x_source[k] > sender_threshold(cfg, group.members, k))
      eq.core.push_back(k);
    else
      eq.periphery.push_back(k);
  }
  for (std::size_t k : group.members) eq.utilities[k] = stage1_utility(eq.network, cfg, k).value;
  return eq;
}

std::vector<double> start_point(const GameConfig& cfg, const std::vector<std::size_t>& pv, int k,
                                std::uint64_t seed) {
  std::vector<double> x(pv.size());
  SplitMix64 rng(seed, static_cast<std::uint64_t>(k));
  for (std::size_t a = 0; a < pv.size(); ++a) {
    const double lo = cfg.floor_of(pv[a]);
    const double hi = cfg.players[pv[a]].tau;
    switch (k) {
      case 0: x[a] = lo; break;
      case 1: x[a] = hi; break;
      case 2: x[a] = 0.5 * (lo + hi); break;
      default: x[a] = lo + (hi - lo) * rng.uniform(); break;
    }
  }
  return x;
}

}  // namespace

std::vector<std::size_t> potential_visible_set(const GameConfig& cfg, const Group& group) {
  std::vector<std::size_t> pv;
  for (std::size_t i : group.members)
    if (sender_threshold(cfg, group.members, i) < cfg.players[i].tau) pv.push_back(i);
  return pv;
}

std::vector<std::size_t> potential_visible_set(const GameConfig& cfg, Side side) {
  return potential_visible_set(cfg, side_group(cfg, side));
}

std::vector<double> source_map(const GameConfig& cfg, const std::vector<std::size_t>& members,
                               const std::vector<double>& x) {
  std::vector<double> t(members.size());
  for (std::size_t a = 0; a < members.size(); ++a) {
    const std::size_t i = members[a];
    double sum = 0.0;
    for (std::size_t b = 0; b < members.size(); ++b)
      if (b != a) sum += influence(x[b], cfg.visibility(i, members[b]), cfg.nu);
    t[a] = std::max(cfg.players[i].tau - sum, cfg.floor_of(i));
  }
  return t;
}

std::vector<Equilibrium> solve_group_all(const GameConfig& cfg, const Group& group,
                                         const SolverOptions& opts) {
  cfg.validate();
  if (group.members.empty()) throw ValidationError("solve: empty player group");
  const std::vector<std::size_t> pv = potential_visible_set(cfg, group);

  std::vector<StartResult> found;
  int run = 0;
  int converged = 0;
  std::vector<double> worst_trace;
  double worst_residual = 0.0;
  const int starts = opts.initial ? 1 : std::max(1, opts.starts);
  for (int k = 0; k < starts; ++k) {
    std::vector<double> x0;
    if (opts.initial) {
      if (opts.initial->size() != pv.size())
        throw ValidationError("solve: initial point must have one entry per potentially visible player");
      x0 = *opts.initial;
    } else {
      x0 = start_point(cfg, pv, k, opts.seed);
    }
    StartResult res = pv.empty() ? StartResult{true, {}, 0.0, 0, false, {}}
                                 : run_start(cfg, pv, std::move(x0), opts);
    ++run;
    if (!res.converged) {
      if (res.residual > worst_residual) {
        worst_residual = res.residual;
        worst_trace = res.trace;
      }
      continue;
    }
    ++converged;
    const bool dup = std::any_of(found.begin(), found.end(), [&](const StartResult& f) {
      return sup_norm_diff(f.x, res.x) <= opts.distinct_tol;
    });
    if (!dup) found.push_back(std::move(res));
    if (pv.empty()) break;
  }
  if (found.empty()) {
    std::ostringstream os;
    os << "solve: no start converged (" << run << " starts, worst residual " << worst_residual
       << "; trailing residuals: " << trace_summary(worst_trace) << ")";
    throw SolverError(os.str());
  }

  std::vector<Equilibrium> out;
  for (const StartResult& f : found) {
    Equilibrium eq = back_out(cfg, group, pv, f.x);
    eq.meta.iterations = f.iterations;
    eq.meta.residual = pv.empty() ? 0.0 : residual(cfg, pv, f.x);
    eq.meta.path = f.used_newton ? "damped+newton" : "damped";
    eq.meta.starts_run = run;
    eq.meta.starts_converged = converged;
    eq.meta.distinct_fixed_points = static_cast<int>(found.size());
    eq.meta.multiple = found.size() > 1;
    out.push_back(std::move(eq));
  }
  std::sort(out.begin(), out.end(), [](const Equilibrium& a, const Equilibrium& b) {
    return a.total_source() < b.total_source();
  });
  return out;
}

Equilibrium solve_group(const GameConfig& cfg, const Group& group, const SolverOptions& opts) {
  return solve_group_all(cfg, group, opts).front();
}

Equilibrium solve_side(const GameConfig& cfg, Side side, const SolverOptions& opts) {
  if (cfg.merged) throw ValidationError("solve_side: merged game has a single group");
  return solve_group(cfg, side_group(cfg, side), opts);
}

Equilibrium solve_bounded(const GameConfig& cfg, Side side, const SolverOptions& opts) {
  for (std::size_t i : cfg.side_members(side))
    if (!cfg.players[i].tau_floor)
      throw ValidationError("solve_bounded: players[" + std::to_string(i) + "] has no tau_floor");
  return solve_side(cfg, side, opts);
}

GameSolution solve_game(const GameConfig& cfg, const SolverOptions& opts) {
  GameSolution sol;
  sol.profile = AttentionProfile::zeros(cfg);
  std::vector<Group> groups;
  if (cfg.merged) {
    groups.push_back(merged_group(cfg));
  } else {
    for (Side s : {Side::L, Side::R})
      if (!cfg.side_members(s).empty()) groups.push_back(side_group(cfg, s));
  }
  for (const Group& g : groups) {
    Equilibrium eq = solve_group(cfg, g, opts);
    for (std::size_t i : g.members) {
      for (std::size_t s = 0; s < cfg.num_sources(); ++s) sol.profile.source(i, s) = eq.network.source(i, s);
      for (std::size_t j = 0; j < cfg.size(); ++j) sol.profile.peer(i, j) = eq.network.peer(i, j);
    }
    sol.groups.push_back(std::move(eq));
  }
  return sol;
}

double symmetric_fixed_point(double lambda, double tau, int n) {
  if (n < 2) throw DomainError("symmetric_fixed_point: N must be at least 2");
  const ExtendedReal t = phi(lambda);
  if (!(t < tau)) throw DomainError("symmetric_fixed_point: requires lambda > 1 and tau > phi(lambda)");
  double lo = t.value();
  double hi = tau;
  const double m = static_cast<double>(n - 1);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (mid - tau + m * h(mid, lambda) > 0.0)
      hi = mid;
    else
      lo = mid;
    if (hi - lo <= 1e-15 * hi) break;
  }
  return 0.5 * (lo + hi);
}

bool fully_connected(const Equilibrium& eqm) {
  for (std::size_t a : eqm.group.members)
    for (std::size_t b : eqm.group.members)
      if (a != b && !(eqm.network.peer(a, b) > 0.0)) return false;
  return true;
}

double closed_form_utility(const Equilibrium& eqm, const GameConfig& cfg, std::size_t i) {
  double expo = 0.0;
  for (std::size_t j : eqm.group.members) {
    expo -= cfg.nu * eqm.x_source[j];
    if (j != i) expo += cfg.nu * visibility_threshold(cfg.visibility(i, j), cfg.nu).value();
  }
  return -0.5 * cfg.players[i].beta * std::exp(expo);
}

double equilibrium_utility(const Equilibrium& eqm, const GameConfig& cfg, std::size_t i) {
  const StageOneUtility direct = stage1_utility(eqm.network, cfg, i);
  if (fully_connected(eqm) && direct.plan == Plan::Default) return closed_form_utility(eqm, cfg, i);
  return direct.value;
}

std::string to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::homogeneous_condition: return "homogeneous_condition";
    case CertificateKind::strong_monotonicity: return "strong_monotonicity";
    case CertificateKind::multi_start_evidence: return "multi_start_evidence";
    case CertificateKind::no_interaction: return "no_interaction";
    case CertificateKind::none: return "none";
  }
  return "none";
}

UniquenessCertificate uniqueness_certificate(const GameConfig& cfg, Side side,
                                             const SolverOptions& opts) {
  cfg.validate();
  const Group group = cfg.merged ? merged_group(cfg) : side_group(cfg, side);
  const std::vector<std::size_t> pv = potential_visible_set(cfg, group);
  UniquenessCertificate cert;
  cert.pv_size = pv.size();
  std::ostringstream detail;

  if (pv.size() <= 1) {
    cert.kind = CertificateKind::no_interaction;
    detail << "|PV| = " << pv.size() << " <= 1";
    cert.detail = detail.str();
    return cert;
  }

  const double nu = cfg.nu;
  const auto& p0 = cfg.players[pv.front()];
  const bool homogeneous =
      !cfg.has_pairwise() && std::all_of(pv.begin(), pv.end(), [&](std::size_t i) {
        const auto& p = cfg.players[i];
        return p.lambda == p0.lambda && p.tau == p0.tau && !p.tau_floor;
      });
  if (homogeneous) {
    const double lam = p0.lambda / nu;
    const double tau = nu * p0.tau;
    const double margin = tau - static_cast<double>(pv.size() - 2) * h(tau, lam) - phi(lam).value();
    detail << "tau - (|PV|-2) h(tau; lambda) - phi(lambda) = " << margin;
    if (margin > 0.0) {
      cert.kind = CertificateKind::homogeneous_condition;
      cert.margin = margin;
      cert.detail = detail.str();
      return cert;
    }
    detail << " (not positive); ";
  }

  const bool bounded = !cfg.has_pairwise() && std::all_of(pv.begin(), pv.end(), [&](std::size_t i) {
    const auto& p = cfg.players[i];
    return p.tau_floor && visibility_threshold(p.lambda, nu) < *p.tau_floor;
  });
  if (bounded) {
    double gbar = 0.0;
    for (std::size_t i : pv)
      gbar = std::max(gbar, influence_slope(*cfg.players[i].tau_floor, cfg.players[i].lambda, nu));
    const double margin = 1.0 / static_cast<double>(pv.size() - 1) - gbar;
    detail << "1/(|PV|-1) - gbar = " << margin << " with gbar = " << gbar;
    if (margin > 0.0) {
      cert.kind = CertificateKind::strong_monotonicity;
      cert.margin = margin;
      cert.detail = detail.str();
      return cert;
    }
    detail << " (not positive); ";
  }

  SolverOptions o = opts;
  o.initial.reset();
  const std::vector<Equilibrium> all = solve_group_all(cfg, group, o);
  const int converged = all.front().meta.starts_converged;
  detail << all.size() << " distinct fixed point(s) from " << converged << " converged of "
         << all.front().meta.starts_run << " starts";
  cert.kind = all.size() == 1 ? CertificateKind::multi_start_evidence : CertificateKind::none;
  cert.margin = static_cast<double>(converged);
  cert.detail = detail.str();
  return cert;
}

LargeSocietyCheck large_society_check(double lambda, double tau, double beta, int n) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("large_society_check: beta must lie in (0,1)");
  LargeSocietyCheck c;
  const double x = symmetric_fixed_point(lambda, tau, n);
  const double ph = phi(lambda).value();
  const double nn = static_cast<double>(n);
  const double lhs = tau / (nn - 1.0) + ph - nn / (nn - 1.0) * x;
  c.x_n = x;
  c.margin = lhs - std::log(beta);
  c.ok = c.margin > 0.0;
  c.deviation_utility =
      -0.5 * std::exp(-tau + nn * (tau - x) / (nn - 1.0) - nn * x + nn * ph);
  c.on_path_utility = -0.5 * beta * std::exp(-nn * x + (nn - 1.0) * ph);
  return c;
}

std::optional<int> min_large_society_size(double lambda, double tau, double beta, int n_max) {
  for (int n = 2; n <= n_max; ++n)
    if (large_society_check(lambda, tau, beta, n).ok) return n;
  return std::nullopt;
}

}  // namespace echo
