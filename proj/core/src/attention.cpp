#include "echo/attention.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace echo {

double ExtendedReal::value() const {
  if (infinite_) throw DomainError("ExtendedReal::value: infinite");
  return value_;
}

std::partial_ordering operator<=>(const ExtendedReal& a, const ExtendedReal& b) {
  if (a.infinite_ && b.infinite_) return std::partial_ordering::equivalent;
  if (a.infinite_) return std::partial_ordering::greater;
  if (b.infinite_) return std::partial_ordering::less;
  return a.value_ <=> b.value_;
}

ExtendedReal phi(double lambda) {
  if (!(lambda >= 0.0)) {
    std::ostringstream os;
    os << "phi: lambda must be nonnegative, got " << lambda;
    throw DomainError(os.str());
  }
  if (lambda <= 1.0) return ExtendedReal::infinity();
  // log(λ/(λ−1)) = −log1p(−1/λ)
  return ExtendedReal::finite(-std::log1p(-1.0 / lambda));
}

double log_expm1(double x) {
  if (x <= 0.0) throw DomainError("log_expm1: argument must be positive");
  if (x > 1.0) return x + std::log1p(-std::exp(-x));
  return std::log(std::expm1(x));
}

namespace {

void check_h_domain(const char* who, double x, double lambda) {
  if (!(lambda > 1.0)) {
    std::ostringstream os;
    os << who << ": lambda must exceed 1, got " << lambda;
    throw DomainError(os.str());
  }
  if (!(x >= phi(lambda).value())) {
    std::ostringstream os;
    os << who << ": x=" << x << " below phi(" << lambda << ")=" << phi(lambda).value();
    throw DomainError(os.str());
  }
}

}  // namespace

double h(double x, double lambda) {
  check_h_domain("h", x, lambda);
  return (std::log(lambda - 1.0) + log_expm1(x)) / lambda;
}

double h_x(double x, double lambda) {
  check_h_domain("h_x", x, lambda);
  // e^x/(e^x − 1) = 1/(1 − e^{−x}); at x = phi(λ) this is exactly λ.
  return 1.0 / (lambda * -std::expm1(-x));
}

double h_lambda(double x, double lambda) {
  check_h_domain("h_lambda", x, lambda);
  return (1.0 / (lambda - 1.0) - h(x, lambda)) / lambda;
}

ExtendedReal visibility_threshold(double lambda, double nu) {
  if (!(nu > 0.0)) throw DomainError("visibility_threshold: nu must be positive");
  const ExtendedReal t = phi(lambda / nu);
  if (t.is_infinite()) return t;
  return ExtendedReal::finite(t.value() / nu);
}

double candidate_attention(double source, double lambda, double gamma, double nu) {
  if (source <= 0.0 || gamma >= lambda) return 0.0;
  const double log_arg = std::log(lambda / gamma - 1.0) + log_expm1(nu * source);
  return log_arg > 0.0 ? log_arg / lambda : 0.0;
}

double influence(double source, double lambda, double nu) {
  return candidate_attention(source, lambda, nu, nu);
}

double influence_slope(double source, double lambda, double nu) {
  return h_x(nu * source, lambda / nu);
}

double influence_lambda(double source, double lambda, double nu) {
  return h_lambda(nu * source, lambda / nu) / (nu * nu);
}

std::string to_string(Side s) { return s == Side::L ? "L" : "R"; }
std::string to_string(Plan p) { return p == Plan::Default ? "default" : "contrarian"; }
std::string to_string(SourceKind k) {
  switch (k) {
    case SourceKind::l: return "l";
    case SourceKind::r: return "r";
    case SourceKind::m: return "m";
  }
  return "?";
}

std::size_t GameConfig::num_sources() const {
  return merged ? 1 : static_cast<std::size_t>(k_left + k_right);
}

SourceKind GameConfig::source_kind(std::size_t s) const {
  if (merged) return SourceKind::m;
  return s < static_cast<std::size_t>(k_left) ? SourceKind::l : SourceKind::r;
}

bool GameConfig::reveals(std::size_t s, State omega) const {
  switch (source_kind(s)) {
    case SourceKind::l: return omega == State::R;
    case SourceKind::r: return omega == State::L;
    case SourceKind::m: return true;
  }
  return false;
}

double GameConfig::visibility(std::size_t receiver, std::size_t sender) const {
  const auto& row = players[receiver].pairwise_lambda;
  return row.empty() ? players[sender].lambda : row[sender];
}

bool GameConfig::has_pairwise() const {
  return std::any_of(players.begin(), players.end(),
                     [](const PlayerParams& p) { return !p.pairwise_lambda.empty(); });
}

std::vector<std::size_t> GameConfig::side_members(Side side) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < players.size(); ++i)
    if (players[i].side == side) out.push_back(i);
  return out;
}

double GameConfig::floor_of(std::size_t i) const { return players[i].tau_floor.value_or(0.0); }

void GameConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ValidationError(msg); };
  if (players.empty()) fail("game needs at least one player");
  if (!(nu > 0.0)) fail("nu must be positive");
  if (num_states < 2) fail("num_states must be at least 2");
  if (k_left < 1 || k_right < 1) fail("source multiplicities K1, K2 must be at least 1");
  for (std::size_t i = 0; i < players.size(); ++i) {
    const auto& p = players[i];
    const std::string where = "players[" + std::to_string(i) + "]";
    if (!(p.beta > 0.0 && p.beta < 1.0)) fail(where + ".beta must lie in (0,1)");
    if (!(p.lambda > 0.0)) fail(where + ".lambda must be positive");
    if (!(p.tau > 0.0)) fail(where + ".tau must be positive");
    if (p.tau_floor) {
      if (!(*p.tau_floor >= 0.0)) fail(where + ".tau_floor must be nonnegative");
      if (!(*p.tau_floor < p.tau)) fail(where + ".tau_floor must be below tau");
    }
    if (!p.pairwise_lambda.empty()) {
      if (p.pairwise_lambda.size() != players.size())
        fail(where + ".pairwise_lambda must have one entry per player");
      for (std::size_t j = 0; j < players.size(); ++j)
        if (j != i && !(p.pairwise_lambda[j] > 0.0))
          fail(where + ".pairwise_lambda[" + std::to_string(j) + "] must be positive");
    }
  }
}

SourceKind own_source(const GameConfig& cfg, Side side) {
  if (cfg.merged) return SourceKind::m;
  return side == Side::L ? SourceKind::l : SourceKind::r;
}

SourceKind plan_source(const GameConfig& cfg, Side side, Plan plan) {
  if (cfg.merged) return SourceKind::m;
  const SourceKind own = own_source(cfg, side);
  if (plan == Plan::Default) return own;
  return own == SourceKind::l ? SourceKind::r : SourceKind::l;
}

State default_state(Side side) { return side == Side::L ? State::L : State::R; }
State other_state(State s) { return s == State::L ? State::R : State::L; }

AttentionProfile::AttentionProfile(std::size_t players, std::size_t sources)
    : n_(players), k_(sources), src_(players * sources, 0.0), peer_(players * players, 0.0) {}

AttentionProfile AttentionProfile::zeros(const GameConfig& cfg) {
  return AttentionProfile(cfg.size(), cfg.num_sources());
}

double AttentionProfile::kind_total(const GameConfig& cfg, std::size_t i, SourceKind kind) const {
  double sum = 0.0;
  for (std::size_t s = 0; s < k_; ++s)
    if (cfg.source_kind(s) == kind) sum += source(i, s);
  return sum;
}

double AttentionProfile::active_total(const GameConfig& cfg, std::size_t i, State omega) const {
  double sum = 0.0;
  for (std::size_t s = 0; s < k_; ++s)
    if (cfg.reveals(s, omega)) sum += source(i, s);
  return sum;
}

double AttentionProfile::total(std::size_t i) const {
  double sum = 0.0;
  for (double v : source_row(i)) sum += v;
  for (double v : peer_row(i)) sum += v;
  return sum;
}

void AttentionProfile::set_kind_total(const GameConfig& cfg, std::size_t i, SourceKind kind,
                                      double amount) {
  std::size_t count = 0;
  for (std::size_t s = 0; s < k_; ++s)
    if (cfg.source_kind(s) == kind) ++count;
  if (count == 0) throw ValidationError("set_kind_total: no source of kind " + to_string(kind));
  for (std::size_t s = 0; s < k_; ++s)
    if (cfg.source_kind(s) == kind) source(i, s) = amount / static_cast<double>(count);
}

void AttentionProfile::validate(const GameConfig& cfg, double tol) const {
  if (n_ != cfg.size() || k_ != cfg.num_sources()) {
    std::ostringstream os;
    os << "attention profile shape " << n_ << "x" << k_ << " does not match game "
       << cfg.size() << "x" << cfg.num_sources();
    throw ValidationError(os.str());
  }
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t s = 0; s < k_; ++s)
      if (!(source(i, s) >= 0.0))
        throw ValidationError("negative source attention for player " + std::to_string(i));
    for (std::size_t j = 0; j < n_; ++j) {
      if (!(peer(i, j) >= 0.0))
        throw ValidationError("negative peer attention for player " + std::to_string(i));
      if (i == j && peer(i, j) != 0.0)
        throw ValidationError("player " + std::to_string(i) + " attends to itself");
    }
    if (total(i) > cfg.players[i].tau + tol) {
      std::ostringstream os;
      os << "player " << i << " exceeds bandwidth: " << total(i) << " > " << cfg.players[i].tau;
      throw ValidationError(os.str());
    }
  }
}

double max_abs_difference(const AttentionProfile& a, const AttentionProfile& b) {
  if (a.players() != b.players() || a.sources() != b.sources())
    throw ValidationError("max_abs_difference: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.players(); ++i) {
    for (std::size_t s = 0; s < a.sources(); ++s)
      m = std::max(m, std::abs(a.source(i, s) - b.source(i, s)));
    for (std::size_t j = 0; j < a.players(); ++j)
      m = std::max(m, std::abs(a.peer(i, j) - b.peer(i, j)));
  }
  return m;
}

DisruptionMatrix disruption(const AttentionProfile& x, const GameConfig& cfg) {
  x.validate(cfg);
  DisruptionMatrix d;
  d.source.assign(x.players(), std::vector<double>(x.sources(), 1.0));
  d.peer.assign(x.players(), std::vector<double>(x.players(), 1.0));
  for (std::size_t i = 0; i < x.players(); ++i) {
    for (std::size_t s = 0; s < x.sources(); ++s) d.source[i][s] = std::exp(-cfg.nu * x.source(i, s));
    for (std::size_t j = 0; j < x.players(); ++j)
      if (j != i) d.peer[i][j] = std::exp(-cfg.visibility(i, j) * x.peer(i, j));
  }
  return d;
}

namespace {

// log(δ_a + (1 − δ_a)·δ_b) with δ_a = e^{−a}, δ_b = e^{−b}, a, b ≥ 0.
double log_relay_term(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  const double miss_a = -std::expm1(-a);  // 1 − δ_a
  const double miss_b = -std::expm1(-b);
  const double u = miss_a * miss_b;
  if (u < 0.5) return std::log1p(-u);
  // δ_a + δ_b·(1 − δ_a) evaluated in log space
  const double la = -a;
  const double lb = -b + std::log(miss_a);
  const double hi = std::max(la, lb);
  return hi + std::log1p(std::exp(std::min(la, lb) - hi));
}

}  // namespace

namespace detail {

double log_uninformed_unchecked(const AttentionProfile& x, const GameConfig& cfg, std::size_t i,
                                State omega) {
  double logp = -cfg.nu * x.active_total(cfg, i, omega);
  for (std::size_t j = 0; j < x.players(); ++j) {
    if (j == i) continue;
    const double a = cfg.nu * x.active_total(cfg, j, omega);
    const double b = cfg.visibility(i, j) * x.peer(i, j);
    logp += log_relay_term(a, b);
  }
  return logp;
}

}  // namespace detail

double log_uninformed_prob(const AttentionProfile& x, const GameConfig& cfg, std::size_t i,
                           State omega) {
  if (cfg.num_states != 2) throw ValidationError("uninformed_prob: two-state game required");
  x.validate(cfg);
  if (i >= x.players()) throw ValidationError("uninformed_prob: player index out of range");
  return detail::log_uninformed_unchecked(x, cfg, i, omega);
}

double uninformed_prob(const AttentionProfile& x, const GameConfig& cfg, std::size_t i, State omega) {
  return std::exp(log_uninformed_prob(x, cfg, i, omega));
}

double plan_utility(const AttentionProfile& x, const GameConfig& cfg, std::size_t i, Plan plan) {
  const State d = default_state(cfg.players[i].side);
  if (plan == Plan::Default)
    return -0.5 * cfg.players[i].beta * uninformed_prob(x, cfg, i, other_state(d));
  return -0.5 * uninformed_prob(x, cfg, i, d);
}

StageOneUtility stage1_utility(const AttentionProfile& x, const GameConfig& cfg, std::size_t i) {
  const double def = plan_utility(x, cfg, i, Plan::Default);
  const double con = plan_utility(x, cfg, i, Plan::Contrarian);
  if (def >= con) return {def, Plan::Default};
  return {con, Plan::Contrarian};
}

}  // namespace echo
