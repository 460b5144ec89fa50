#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "echo/diffusion.hpp"
#include "echo/equilibrium.hpp"
#include "echo/influence.hpp"

namespace {

echo::GameConfig heterogeneous(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lam(2.0, 8.0), tau(2.0, 5.0);
  echo::GameConfig cfg;
  for (std::size_t i = 0; i < n; ++i) {
    echo::PlayerParams p;
    p.lambda = lam(rng);
    p.tau = tau(rng);
    cfg.players.push_back(p);
  }
  return cfg;
}

void BM_SolveSide(benchmark::State& state) {
  const auto cfg = heterogeneous(static_cast<std::size_t>(state.range(0)), 7);
  echo::SolverOptions opts;
  opts.starts = 4;
  for (auto _ : state) benchmark::DoNotOptimize(echo::solve_side(cfg, echo::Side::L, opts));
}
BENCHMARK(BM_SolveSide)->Arg(4)->Arg(16)->Arg(64);

void BM_ClosedFormInverse(benchmark::State& state) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  std::vector<double> g(static_cast<std::size_t>(state.range(0)));
  for (auto& v : g) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(echo::closed_form_inverse(g));
}
BENCHMARK(BM_ClosedFormInverse)->Arg(4)->Arg(16)->Arg(64);

void BM_GenericInverse(benchmark::State& state) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  std::vector<double> g(static_cast<std::size_t>(state.range(0)));
  for (auto& v : g) v = u(rng);
  const Eigen::MatrixXd a = echo::influence_matrix(g);
  for (auto _ : state) benchmark::DoNotOptimize(Eigen::MatrixXd(a.inverse()));
}
BENCHMARK(BM_GenericInverse)->Arg(4)->Arg(16)->Arg(64);

void BM_Simulate(benchmark::State& state) {
  const auto cfg = heterogeneous(6, 3);
  const auto sol = echo::solve_game(cfg);
  echo::SimOptions opts;
  opts.threads = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(echo::simulate(sol.profile, cfg, static_cast<std::uint64_t>(state.range(0)), 1, opts));
}
BENCHMARK(BM_Simulate)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
