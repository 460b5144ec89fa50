#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "echo/best_response.hpp"
#include "echo/extensions.hpp"
#include "oracles.hpp"

using namespace echo;

namespace {

GameConfig random_two_sided(std::mt19937_64& rng, int per_side) {
  std::uniform_real_distribution<double> ul(1.3, 6.0), ut(0.8, 3.0);
  GameConfig cfg;
  for (int k = 0; k < 2 * per_side; ++k) {
    PlayerParams p;
    p.side = k < per_side ? Side::L : Side::R;
    p.lambda = ul(rng);
    p.tau = ut(rng);
    p.beta = 1e-4;
    cfg.players.push_back(p);
  }
  return cfg;
}

void expect_same(const Equilibrium& a, const Equilibrium& b, double tol) {
  ASSERT_EQ(a.x_source.size(), b.x_source.size());
  for (std::size_t i = 0; i < a.x_source.size(); ++i) EXPECT_NEAR(a.x_source[i], b.x_source[i], tol);
  EXPECT_LE(max_abs_difference(a.network, b.network), tol);
  EXPECT_EQ(a.core, b.core);
  EXPECT_EQ(a.periphery, b.periphery);
}

}  // namespace

TEST(Merge, SymmetricSidesEqualDoubledPopulation) {
  GameConfig merged = oracle::symmetric_side(5.0, 2.0, 6);
  for (std::size_t i = 3; i < 6; ++i) merged.players[i].side = Side::R;
  merged.merged = true;
  const auto sol = solve_game(merged);
  ASSERT_EQ(sol.groups.size(), 1u);
  const double x = oracle::symmetric_x(5.0, 2.0, 6);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(sol.groups[0].x_source[i], x, 1e-9);
}

TEST(Merge, RoundTripAndSolveThenMap) {
  std::mt19937_64 rng(61);
  for (int rep = 0; rep < 20; ++rep) {
    GameConfig merged = random_two_sided(rng, 2);
    merged.merged = true;
    const Equilibrium e = solve_group(merged, merged_group(merged));
    const auto mapped = merge_map(e, merged);
    // Map-then-solve agrees with solve-then-map.
    const Equilibrium direct = solve_side(one_sided_config(merged), Side::L);
    expect_same(mapped.eqm, direct, 1e-9);
    for (std::size_t i = 0; i < merged.size(); ++i) {
      EXPECT_NEAR(mapped.eqm.utilities[i], stage1_utility(e.network, merged, i).value, 1e-12);
      EXPECT_NEAR(mapped.eqm.utilities[i], direct.utilities[i], 1e-12);
    }
    const Equilibrium back = merge_unmap(mapped.eqm, merged);
    EXPECT_EQ(back.network, e.network);
    EXPECT_EQ(back.group.source, SourceKind::m);
  }
  EXPECT_THROW(one_sided_config(oracle::symmetric_side(2.0, 1.0, 2)), ValidationError);
}

TEST(Split, SingleSourcePerKindIsIdentity) {
  std::mt19937_64 rng(62);
  const GameConfig cfg = random_two_sided(rng, 2);
  const auto x = oracle::random_profile(cfg, rng);
  EXPECT_EQ(split_map(x, cfg), x);
  EXPECT_EQ(split_inverse(x, cfg), x);
}

TEST(Split, RoundTripAndProbabilities) {
  std::mt19937_64 rng(63);
  for (int rep = 0; rep < 20; ++rep) {
    GameConfig multi = random_two_sided(rng, 2);
    multi.k_left = 3;
    multi.k_right = 2;
    const GameConfig base = aggregate_config(multi);
    const auto bx = oracle::random_profile(base, rng);
    SplitWeights w;
    if (rep % 2) w.left = {0.2, 0.5, 0.3};
    const auto mx = split_inverse(bx, multi, w);
    EXPECT_LE(max_abs_difference(split_map(mx, multi), bx), 1e-15);
    const auto random_multi = oracle::random_profile(multi, rng);
    const auto agg = split_map(random_multi, multi);
    for (std::size_t i = 0; i < multi.size(); ++i)
      for (State s : {State::L, State::R})
        EXPECT_NEAR(uninformed_prob(random_multi, multi, i, s), uninformed_prob(agg, base, i, s), 1e-14);
  }
  SplitWeights bad;
  bad.left = {1.0};
  GameConfig multi = oracle::symmetric_side(2.0, 1.0, 2);
  multi.k_left = 2;
  EXPECT_THROW(split_inverse(AttentionProfile::zeros(aggregate_config(multi)), multi, bad), ValidationError);
}

TEST(Split, EquilibriumSurvivesAggregation) {
  GameConfig multi = oracle::symmetric_side(4.0, 2.0, 4);
  multi.k_left = 3;
  const auto sol = solve_game(multi);
  const auto agg = split_map(sol.profile, multi);
  EXPECT_TRUE(verify_equilibrium(agg, aggregate_config(multi)).pass);
  EXPECT_TRUE(verify_equilibrium(sol.profile, multi).pass);
}

TEST(Rescale, UnitNuIsIdentity) {
  std::mt19937_64 rng(64);
  const GameConfig cfg = random_two_sided(rng, 2);
  const GameConfig r = rescale_visibility(cfg);
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    EXPECT_EQ(r.players[i].lambda, cfg.players[i].lambda);
    EXPECT_EQ(r.players[i].tau, cfg.players[i].tau);
  }
  GameConfig bad = cfg;
  bad.nu = 0.0;
  EXPECT_THROW(rescale_visibility(bad), DomainError);
}

TEST(Rescale, SymmetricAnchorDividedByNu) {
  GameConfig cfg = oracle::symmetric_side(5.0, 2.0, 6);
  cfg.nu = 2.0;
  const auto direct = solve_side(cfg, Side::L);
  const double x = oracle::symmetric_x(2.5, 4.0, 6) / 2.0;
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(direct.x_source[i], x, 1e-9);
}

TEST(Rescale, DualPathAgreement) {
  std::mt19937_64 rng(65);
  std::uniform_real_distribution<double> un(0.4, 2.5);
  for (int rep = 0; rep < 20; ++rep) {
    GameConfig cfg = random_two_sided(rng, 3);
    cfg.nu = un(rng);
    const auto direct = solve_game(cfg);
    const auto via = solve_via_rescaling(cfg);
    ASSERT_EQ(direct.groups.size(), via.groups.size());
    for (std::size_t g = 0; g < direct.groups.size(); ++g) expect_same(direct.groups[g], via.groups[g], 1e-9);
    EXPECT_LE(max_abs_difference(direct.profile, via.profile), 1e-9);
  }
}

TEST(MState, BudgetKktAndStructure) {
  const MStateParams p{3, 3, 2.0, 4.0, 0.01};
  const auto s = solve_m_state(p);
  EXPECT_EQ(s.delta_star, 0.0);
  EXPECT_GT(s.y_star, s.z_star);
  EXPECT_GT(s.z_star, 0.0);
  EXPECT_NEAR((p.M - 1) * s.x_star + (p.N - 1) * s.y_star + (p.M - 1) * p.N * s.z_star, p.tau, 1e-10);
  // Independent forms of g1, g2.
  EXPECT_NEAR(s.y_star, std::log((2.0 * 2 - 1) * std::expm1(s.x_star)) / 2.0, 1e-12);
  EXPECT_NEAR(s.z_star, std::log((2.0 * 1 - 1) * std::expm1(s.x_star)) / 2.0, 1e-12);
  const auto prof = m_state_profile(p, s);
  EXPECT_LE(m_state_kkt_residual(prof, p), 1e-8);
  for (std::size_t i = 0; i < prof.sources.size(); ++i) {
    double total = 0.0;
    for (double v : prof.sources[i]) total += v;
    for (double v : prof.peers[i]) total += v;
    EXPECT_NEAR(total, p.tau, 1e-10);
  }
}

TEST(MState, KktDetectsPerturbation) {
  const MStateParams p{3, 3, 2.0, 4.0, 0.01};
  auto prof = m_state_profile(p, solve_m_state(p));
  prof.sources[0][1] += 0.2;
  prof.sources[0][2] -= 0.2;
  EXPECT_GT(m_state_kkt_residual(prof, p), 1e-3);
}

TEST(MState, TwoStatesReduceToSymmetricFixedPoint) {
  for (int n : {2, 4, 6}) {
    const MStateParams p{2, n, 5.0, 2.0, 0.01};
    const auto s = solve_m_state(p);
    EXPECT_NEAR(s.x_star, oracle::symmetric_x(5.0, 2.0, n), 1e-10);
    EXPECT_EQ(s.z_star, 0.0);
    EXPECT_NEAR(s.y_star, oracle::h(s.x_star, 5.0), 1e-10);
  }
}

TEST(MState, DomainConditions) {
  EXPECT_THROW(solve_m_state({3, 3, 0.5, 4.0, 0.01}), DomainError);   // λ ≤ 1/(M−1)
  const double bound = 2.0 * oracle::phi(4.0);
  EXPECT_THROW(solve_m_state({3, 3, 2.0, bound - 1e-3, 0.01}), DomainError);
  EXPECT_NO_THROW(solve_m_state({3, 3, 2.0, bound + 0.5, 0.01}));
  EXPECT_THROW(solve_m_state({1, 3, 2.0, 4.0, 0.01}), DomainError);
}
