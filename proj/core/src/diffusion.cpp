#include "echo/diffusion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <thread>

#include "echo/rng.hpp"

namespace echo {

const SimCell& SimReport::cell(std::size_t player, State state) const {
  return cells.at(2 * player + (state == State::L ? 0 : 1));
}

namespace {

struct Counters {
  std::array<std::uint64_t, 2> per_state{};
  std::vector<std::uint64_t> uninformed;  // [player * 2 + state]
};

struct Channels {
  // hit probabilities
  std::array<std::vector<std::vector<double>>, 2> source;  // [state][player][revealing slot]
  std::vector<double> peer;                                 // [receiver * n + sender]
};

Channels channels(const AttentionProfile& x, const GameConfig& cfg) {
  const std::size_t n = cfg.size();
  Channels c;
  for (int w = 0; w < 2; ++w) {
    const State omega = w == 0 ? State::L : State::R;
    c.source[w].resize(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t s = 0; s < cfg.num_sources(); ++s)
        if (cfg.reveals(s, omega)) c.source[w][i].push_back(-std::expm1(-cfg.nu * x.source(i, s)));
  }
  c.peer.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) c.peer[i * n + j] = -std::expm1(-cfg.visibility(i, j) * x.peer(i, j));
  return c;
}

void run_range(const Channels& ch, std::size_t n, std::uint64_t seed, std::uint64_t begin,
               std::uint64_t end, Counters& out) {
  out.uninformed.assign(2 * n, 0);
  std::vector<char> first(n), informed(n);
  for (std::uint64_t r = begin; r < end; ++r) {
    SplitMix64 rng(seed, r);
    const int w = rng.uniform() < 0.5 ? 0 : 1;
    ++out.per_state[static_cast<std::size_t>(w)];
    for (std::size_t i = 0; i < n; ++i) {
      bool hit = false;
      for (double p : ch.source[w][i]) hit = (rng.uniform() < p) || hit;
      first[i] = hit;
    }
    // Only round-1 informed players relay.
    for (std::size_t i = 0; i < n; ++i) {
      bool hit = first[i] != 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const bool reach = rng.uniform() < ch.peer[i * n + j];
        if (first[j] && reach) hit = true;
      }
      informed[i] = hit;
    }
    for (std::size_t i = 0; i < n; ++i)
      if (!informed[i]) ++out.uninformed[2 * i + static_cast<std::size_t>(w)];
  }
}

}  // namespace

SimReport simulate(const AttentionProfile& x, const GameConfig& cfg, std::uint64_t draws,
                   std::uint64_t seed, const SimOptions& opts) {
  cfg.validate();
  x.validate(cfg);
  if (cfg.num_states != 2) throw ValidationError("simulate: two-state game required");
  if (draws == 0) throw ValidationError("simulate: draws must be at least 1");
  const std::size_t n = cfg.size();
  const Channels ch = channels(x, cfg);

  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, draws));
  std::vector<Counters> parts(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    const std::uint64_t begin = draws * t / threads;
    const std::uint64_t end = draws * (t + 1) / threads;
    pool.emplace_back(run_range, std::cref(ch), n, seed, begin, end, std::ref(parts[t]));
  }
  for (auto& th : pool) th.join();

  Counters total;
  total.uninformed.assign(2 * n, 0);
  for (const Counters& c : parts) {
    for (std::size_t w = 0; w < 2; ++w) total.per_state[w] += c.per_state[w];
    for (std::size_t k = 0; k < 2 * n; ++k) total.uninformed[k] += c.uninformed[k];
  }

  SimReport rep;
  rep.draws = draws;
  rep.seed = seed;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t w = 0; w < 2; ++w) {
      SimCell c;
      c.player = i;
      c.state = w == 0 ? State::L : State::R;
      c.samples = total.per_state[w];
      c.uninformed = total.uninformed[2 * i + w];
      c.analytic = uninformed_prob(x, cfg, i, c.state);
      if (c.samples > 0) {
        const double m = static_cast<double>(c.samples);
        c.estimate = static_cast<double>(c.uninformed) / m;
        c.std_error = std::sqrt(c.estimate * (1.0 - c.estimate) / m);
        const double se = c.std_error > 0.0 ? c.std_error : std::sqrt(c.analytic * (1.0 - c.analytic) / m);
        const double diff = c.estimate - c.analytic;
        if (se > 0.0)
          c.z = diff / se;
        else
          c.z = std::abs(diff) <= 1e-15 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
      }
      rep.cells.push_back(c);
    }
    const StageOneUtility u = stage1_utility(x, cfg, i);
    const State d = default_state(cfg.players[i].side);
    rep.plans.push_back(u.plan);
    rep.analytic_utility.push_back(u.value);
    rep.utility.push_back(u.plan == Plan::Default
                              ? -0.5 * cfg.players[i].beta * rep.cell(i, other_state(d)).estimate
                              : -0.5 * rep.cell(i, d).estimate);
  }
  return rep;
}

Comparison compare_analytic(const SimReport& rep, double z_threshold) {
  Comparison c;
  std::size_t ok = 0;
  for (std::size_t k = 0; k < rep.cells.size(); ++k) {
    const double az = std::abs(rep.cells[k].z);
    c.max_abs_z = std::max(c.max_abs_z, az);
    if (az <= z_threshold)
      ++ok;
    else
      c.flagged.push_back(k);
  }
  c.pass = c.flagged.empty();
  c.coverage = rep.cells.empty() ? 1.0 : static_cast<double>(ok) / static_cast<double>(rep.cells.size());
  return c;
}

}  // namespace echo
