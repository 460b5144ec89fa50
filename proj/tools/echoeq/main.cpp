#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "echo/errors.hpp"

namespace {

enum Exit { kOk = 0, kInput = 2, kConvergence = 3, kAssumption = 4, kInternal = 5 };

void emit(const echoeq::Output& out, const std::string& format, const std::string& path) {
  const std::string text = format == "csv" ? out.csv : out.doc.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw echo::ValidationError("--out " + path + ": cannot open for writing");
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"echoeq: equilibria of the rational-inattention echo-chamber game"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ECHO_TOOL_VERSION));

  std::string instance, out_path, format = "json", param;
  std::uint64_t draws = 100000, seed = 1;
  std::size_t player = 0, sender = 0;
  double lambda = 0, tau = 0, beta = 0.1;
  int n = 0, m = 0;
  std::vector<std::string> axes;
  echoeq::Overrides ov;
  double tol = 0, damping = 0;
  int starts = 0;
  std::uint64_t solver_seed = 0;

  auto common = [&](CLI::App* sub, bool solver_flags) {
    sub->add_option("--out", out_path, "Output file (default stdout)");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    if (solver_flags) {
      sub->add_option("--tol", tol, "Fixed-point residual tolerance")->check(CLI::PositiveNumber);
      sub->add_option("--starts", starts, "Multi-start count")->check(CLI::PositiveNumber);
      sub->add_option("--damping", damping, "Damping factor in (0,1]")->check(CLI::Range(1e-6, 1.0));
    }
  };

  auto* solve = app.add_subcommand("solve", "Solve every echo chamber of an instance");
  solve->add_option("--instance", instance, "Instance JSON")->required();
  common(solve, true);
  solve->add_option("--seed", solver_seed, "Multi-start seed");

  auto* unique = app.add_subcommand("check-unique", "Uniqueness certificate per group");
  unique->add_option("--instance", instance, "Instance JSON")->required();
  common(unique, true);
  unique->add_option("--seed", solver_seed, "Multi-start seed");

  auto* compstat = app.add_subcommand("compstat", "Local comparative statics with finite-difference check");
  compstat->add_option("--instance", instance, "Instance JSON")->required();
  compstat->add_option("--player", player, "Perturbed player (receiver for pairwise)")->required();
  compstat->add_option("--param", param, "tau, lambda or pairwise")
      ->required()
      ->check(CLI::IsMember({"tau", "lambda", "pairwise"}));
  auto* sender_opt = compstat->add_option("--sender", sender, "Sender for pairwise visibility");
  common(compstat, true);
  compstat->add_option("--seed", solver_seed, "Multi-start seed");

  auto* planner = app.add_subcommand("planner", "Efficient profile and welfare gap");
  planner->add_option("--lambda", lambda)->required();
  planner->add_option("--tau", tau)->required();
  planner->add_option("--N", n)->required();
  planner->add_option("--beta", beta);
  common(planner, false);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo check of uninformed probabilities");
  sim->add_option("--instance", instance, "Instance JSON")->required();
  sim->add_option("--draws", draws, "Replications")->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "Root seed");
  common(sim, true);

  auto* sweep = app.add_subcommand("sweep", "Grid sweep, long-format CSV");
  sweep->add_option("--instance", instance, "Template instance JSON")->required();
  sweep->add_option("--axis", axes, "param[@player]=v1,v2 or start:stop:step")->required();
  common(sweep, true);
  sweep->add_option("--seed", solver_seed, "Multi-start seed");

  auto* mstate = app.add_subcommand("mstate", "Symmetric M-state generalized echo chamber");
  mstate->add_option("--M", m)->required();
  mstate->add_option("--N", n)->required();
  mstate->add_option("--lambda", lambda)->required();
  mstate->add_option("--tau", tau)->required();
  mstate->add_option("--beta", beta);
  common(mstate, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  auto overrides = [&](CLI::App* sub) {
    if (sub->count("--tol")) ov.tol = tol;
    if (sub->count("--starts")) ov.starts = starts;
    if (sub->count("--damping")) ov.damping = damping;
    if (sub != sim && sub->count("--seed")) ov.seed = solver_seed;
  };

  try {
    echoeq::Output out;
    if (solve->parsed()) {
      overrides(solve);
      out = echoeq::cmd_solve(echoeq::load_instance(instance), ov);
    } else if (unique->parsed()) {
      overrides(unique);
      out = echoeq::cmd_check_unique(echoeq::load_instance(instance), ov);
    } else if (compstat->parsed()) {
      overrides(compstat);
      std::optional<std::size_t> s;
      if (sender_opt->count()) s = sender;
      out = echoeq::cmd_compstat(echoeq::load_instance(instance), player, param, s, ov);
    } else if (planner->parsed()) {
      out = echoeq::cmd_planner(lambda, tau, n, beta);
    } else if (sim->parsed()) {
      overrides(sim);
      out = echoeq::cmd_simulate(echoeq::load_instance(instance), draws, seed, ov);
    } else if (sweep->parsed()) {
      overrides(sweep);
      std::vector<echoeq::Axis> parsed;
      for (const auto& a : axes) parsed.push_back(echoeq::parse_axis(a));
      out = echoeq::cmd_sweep(echoeq::load_instance(instance).source, parsed, ov);
    } else if (mstate->parsed()) {
      out = echoeq::cmd_mstate(m, n, lambda, tau, beta);
    }
    emit(out, format, out_path);
  } catch (const echo::PreconditionError& e) {
    std::cerr << "assumption violated: " << e.what() << "\n";
    return kAssumption;
  } catch (const echo::ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInput;
  } catch (const echo::DomainError& e) {
    std::cerr << "assumption violated: " << e.what() << "\n";
    return kAssumption;
  } catch (const echo::SolverError& e) {
    std::cerr << "no convergence: " << e.what() << "\n";
    return kConvergence;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}
