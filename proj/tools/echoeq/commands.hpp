#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "instance.hpp"

namespace echoeq {

/// Solver flags given on the command line; they take precedence over the instance.
struct Overrides {
  std::optional<double> tol;
  std::optional<int> starts;
  std::optional<double> damping;
  std::optional<std::uint64_t> seed;
};

struct Output {
  json doc;
  std::string csv;
};

echo::SolverOptions solver_options(const Instance& inst, const Overrides& ov);

Output cmd_solve(const Instance& inst, const Overrides& ov = {});
Output cmd_check_unique(const Instance& inst, const Overrides& ov = {});

/// param is "tau", "lambda" or "pairwise" (which needs `sender`).
Output cmd_compstat(const Instance& inst, std::size_t player, const std::string& param,
                    std::optional<std::size_t> sender, const Overrides& ov = {});

Output cmd_planner(double lambda, double tau, int n, double beta);
Output cmd_simulate(const Instance& inst, std::uint64_t draws, std::uint64_t seed, const Overrides& ov = {});
Output cmd_mstate(int m, int n, double lambda, double tau, double beta);

struct Axis {
  std::string param;  ///< N, lambda, tau or nu
  std::optional<std::size_t> player;  ///< index into game.players of the template
  std::vector<double> values;
  [[nodiscard]] std::string label() const;
};

/// "param[@player]=v1,v2,..." or "param[@player]=start:stop:step".
Axis parse_axis(const std::string& spec);

/// Cartesian grid over the axes, one row per (cell, player).
Output cmd_sweep(const json& template_doc, const std::vector<Axis>& axes, const Overrides& ov = {});

}  // namespace echoeq
