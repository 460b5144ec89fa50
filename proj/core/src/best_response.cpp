#include "echo/best_response.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace echo {

namespace {

State plan_state(Side side, Plan plan) {
  const State d = default_state(side);
  return plan == Plan::Default ? other_state(d) : d;
}

struct PeerCandidates {
  std::vector<double> sender_source;  // ν-free attention of j to the plan source kind
  std::vector<double> visibility;     // λ_i^j
  double max_visibility = 0.0;
};

PeerCandidates collect_candidates(std::size_t i, const AttentionProfile& profile,
                                  const GameConfig& cfg, SourceKind kind) {
  PeerCandidates c;
  c.sender_source.assign(cfg.size(), 0.0);
  c.visibility.assign(cfg.size(), 0.0);
  for (std::size_t j = 0; j < cfg.size(); ++j) {
    if (j == i) continue;
    c.sender_source[j] = profile.kind_total(cfg, j, kind);
    c.visibility[j] = cfg.visibility(i, j);
    if (c.sender_source[j] > 0.0) c.max_visibility = std::max(c.max_visibility, c.visibility[j]);
  }
  return c;
}

double peer_budget(const PeerCandidates& c, std::size_t i, double gamma, double nu,
                   std::vector<double>* out = nullptr) {
  double sum = 0.0;
  for (std::size_t j = 0; j < c.sender_source.size(); ++j) {
    const double v = j == i ? 0.0 : candidate_attention(c.sender_source[j], c.visibility[j], gamma, nu);
    if (out) (*out)[j] = v;
    sum += v;
  }
  return sum;
}

}  // namespace

double plan_objective(std::size_t i, const AttentionProfile& profile, const GameConfig& cfg,
                      Plan plan) {
  return -detail::log_uninformed_unchecked(profile, cfg, i,
                                           plan_state(cfg.players[i].side, plan));
}

BestResponse best_response(std::size_t i, const AttentionProfile& profile, const GameConfig& cfg,
                           Plan plan, const BestResponseOptions& opts) {
  if (i >= cfg.size()) throw ValidationError("best_response: player index out of range");
  const PlayerParams& p = cfg.players[i];
  const double floor = cfg.floor_of(i);
  const double budget = p.tau - floor;
  if (!(budget > 0.0)) throw ValidationError("best_response: empty attention budget");

  const SourceKind own = own_source(cfg, p.side);
  const SourceKind kind = plan_source(cfg, p.side, plan);
  const PeerCandidates cand = collect_candidates(i, profile, cfg, kind);
  const double nu = cfg.nu;

  BestResponse br;
  br.player = i;
  br.plan = plan;
  br.peers.assign(cfg.size(), 0.0);

  double gamma = nu;
  double used = peer_budget(cand, i, gamma, nu);
  if (used > budget) {
    // Budget binds with no slack for the plan source: find γ with B(γ) = budget.
    double lo = nu;
    double hi = cand.max_visibility;
    int it = 0;
    double b_hi = 0.0;
    for (; it < opts.max_bisections; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double b_mid = peer_budget(cand, i, mid, nu);
      if (b_mid > budget) {
        lo = mid;
      } else {
        hi = mid;
        b_hi = b_mid;
        if (budget - b_mid <= opts.budget_tol) break;
      }
    }
    b_hi = peer_budget(cand, i, hi, nu);
    if (budget - b_hi > 1e-9) {
      std::ostringstream os;
      os << "best_response: multiplier bisection for player " << i << " stalled, bracket [" << lo
         << ", " << hi << "], budget residual " << budget - b_hi;
      throw SolverError(os.str());
    }
    gamma = hi;
  }
  used = peer_budget(cand, i, gamma, nu, &br.peers);
  double slack = std::max(0.0, budget - used);
  if (gamma > nu && slack > 0.0) {
    // Bisection leftover (≤ budget_tol) goes to the largest peer entry, keeping the source at zero.
    *std::max_element(br.peers.begin(), br.peers.end()) += slack;
    slack = 0.0;
  }

  AttentionProfile row_profile = profile;
  for (std::size_t s = 0; s < row_profile.sources(); ++s) row_profile.source(i, s) = 0.0;
  for (std::size_t j = 0; j < row_profile.players(); ++j) row_profile.peer(i, j) = br.peers[j];
  if (kind == own) {
    row_profile.set_kind_total(cfg, i, kind, floor + slack);
  } else {
    if (floor > 0.0) row_profile.set_kind_total(cfg, i, own, floor);
    row_profile.set_kind_total(cfg, i, kind, slack);
  }
  br.sources.assign(row_profile.source_row(i).begin(), row_profile.source_row(i).end());
  br.multiplier = gamma;

  for (std::size_t s = 0; s < br.sources.size(); ++s)
    if (br.sources[s] > 0.0) br.active_set.push_back({true, s});
  for (std::size_t j = 0; j < br.peers.size(); ++j)
    if (br.peers[j] > 0.0) br.active_set.push_back({false, j});

  br.objective = plan_objective(i, row_profile, cfg, plan);
  const double prob = std::exp(-br.objective);
  br.utility = plan == Plan::Default ? -0.5 * p.beta * prob : -0.5 * prob;
  return br;
}

void apply(const BestResponse& br, AttentionProfile& profile) {
  for (std::size_t s = 0; s < profile.sources(); ++s) profile.source(br.player, s) = br.sources[s];
  for (std::size_t j = 0; j < profile.players(); ++j) profile.peer(br.player, j) = br.peers[j];
}

ThresholdReport beta_threshold(const GameConfig& cfg) {
  cfg.validate();
  if (cfg.num_states != 2) throw ValidationError("beta_threshold: two-state game required");
  ThresholdReport rep;
  rep.per_player.assign(cfg.size(), 1.0);
  rep.global = 1.0;
  if (cfg.merged) return rep;  // P(U|ω=d) = P(U|ω≠d): the default plan always wins.

  for (std::size_t i = 0; i < cfg.size(); ++i) {
    const SourceKind target = plan_source(cfg, cfg.players[i].side, Plan::Contrarian);
    AttentionProfile bar = AttentionProfile::zeros(cfg);
    for (std::size_t j = 0; j < cfg.size(); ++j) {
      if (j == i) continue;
      const double floor = cfg.floor_of(j);
      const SourceKind own_j = own_source(cfg, cfg.players[j].side);
      if (own_j == target) {
        bar.set_kind_total(cfg, j, target, cfg.players[j].tau);
      } else {
        if (floor > 0.0) bar.set_kind_total(cfg, j, own_j, floor);
        bar.set_kind_total(cfg, j, target, cfg.players[j].tau - floor);
      }
    }
    const BestResponse br = best_response(i, bar, cfg, Plan::Contrarian);
    // β̄_i = P_contrarian / P_default-guarantee with the guarantee e^{−ν τ_i}.
    rep.per_player[i] = std::exp(cfg.nu * cfg.players[i].tau - br.objective);
    rep.global = std::min(rep.global, rep.per_player[i]);
  }
  return rep;
}

VerificationReport verify_equilibrium(const AttentionProfile& x, const GameConfig& cfg, double tol) {
  cfg.validate();
  x.validate(cfg);
  VerificationReport rep;
  rep.tol = tol;
  rep.pass = true;
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    PlayerVerification v;
    v.player = i;
    v.current_utility = stage1_utility(x, cfg, i).value;
    const BestResponse def = best_response(i, x, cfg, Plan::Default);
    const BestResponse con = best_response(i, x, cfg, Plan::Contrarian);
    v.default_utility = def.utility;
    v.contrarian_utility = con.utility;
    const BestResponse& best = def.utility >= con.utility ? def : con;
    v.best_plan = best.plan;
    v.gain = best.utility - v.current_utility;

    double dev = 0.0;
    for (SourceKind kind : {SourceKind::l, SourceKind::r, SourceKind::m}) {
      double have = x.kind_total(cfg, i, kind);
      double want = 0.0;
      for (std::size_t s = 0; s < best.sources.size(); ++s)
        if (cfg.source_kind(s) == kind) want += best.sources[s];
      dev = std::max(dev, std::abs(have - want));
    }
    for (std::size_t j = 0; j < cfg.size(); ++j)
      dev = std::max(dev, std::abs(x.peer(i, j) - best.peers[j]));
    v.profile_deviation = dev;

    rep.max_profile_deviation = std::max(rep.max_profile_deviation, dev);
    rep.max_gain = std::max(rep.max_gain, v.gain);
    if (dev > tol || v.gain > tol) rep.pass = false;
    rep.players.push_back(v);
  }
  return rep;
}

}  // namespace echo
