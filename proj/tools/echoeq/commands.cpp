#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "echo/best_response.hpp"
#include "echo/comparative_statics.hpp"
#include "echo/diffusion.hpp"
#include "echo/equilibrium.hpp"
#include "echo/extensions.hpp"
#include "echo/influence.hpp"
#include "echo/planner.hpp"
#include "format.hpp"

#ifndef ECHO_TOOL_VERSION
#define ECHO_TOOL_VERSION "0.0.0"
#endif

namespace echoeq {

using namespace echo;

namespace {

json solver_json(const SolverOptions& o) {
  return {{"damping", o.damping}, {"tol", o.tol},     {"accept_tol", o.accept_tol},
          {"max_iter", o.max_iter}, {"starts", o.starts}, {"seed", o.seed}};
}

json provenance(const json& input, const std::optional<SolverOptions>& o) {
  json p = {{"tool", "echoeq"}, {"version", ECHO_TOOL_VERSION}, {"config_hash", config_hash(input)}};
  if (o) p["solver"] = solver_json(*o);
  return p;
}

std::string group_label(const Group& g) {
  return g.source == SourceKind::m ? "merged" : (g.source == SourceKind::l ? "L" : "R");
}

void require_two_states(const GameConfig& cfg) {
  if (cfg.num_states != 2)
    throw ValidationError("$.game.M: this command needs a two-state game; use mstate for M > 2");
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

json profile_json(const AttentionProfile& x) {
  json src = json::array(), peers = json::array();
  for (std::size_t i = 0; i < x.players(); ++i) {
    src.push_back(std::vector<double>(x.source_row(i).begin(), x.source_row(i).end()));
    peers.push_back(std::vector<double>(x.peer_row(i).begin(), x.peer_row(i).end()));
  }
  return {{"sources", src}, {"peers", peers}};
}

json certificate_json(const UniquenessCertificate& c) {
  return {{"kind", to_string(c.kind)}, {"margin", c.margin}, {"pv_size", c.pv_size}, {"detail", c.detail}};
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

}  // namespace

SolverOptions solver_options(const Instance& inst, const Overrides& ov) {
  SolverOptions o = inst.solver;
  if (ov.tol) {
    o.tol = *ov.tol;
    o.accept_tol = std::max(o.accept_tol, o.tol);
  }
  if (ov.starts) o.starts = *ov.starts;
  if (ov.damping) o.damping = *ov.damping;
  if (ov.seed) o.seed = *ov.seed;
  return o;
}

Output cmd_solve(const Instance& inst, const Overrides& ov) {
  const GameConfig& cfg = inst.game;
  require_two_states(cfg);
  const SolverOptions opts = solver_options(inst, ov);
  const GameSolution sol = solve_game(cfg, opts);
  const VerificationReport ver = verify_equilibrium(sol.profile, cfg);
  const ThresholdReport thr = beta_threshold(cfg);

  Output out;
  out.doc["command"] = "solve";
  out.doc["provenance"] = provenance(inst.source, opts);
  CsvTable csv({"player", "side", "group", "x_source", "in_core", "multiplier", "utility", "plan",
                "group_size", "group_total_source"});
  json groups = json::array();
  json players = json::array();
  for (const Equilibrium& e : sol.groups) {
    const Side side = e.group.source == SourceKind::r ? Side::R : Side::L;
    const UniquenessCertificate cert = uniqueness_certificate(cfg, side, opts);
    groups.push_back({{"group", group_label(e.group)},
                      {"members", e.group.members},
                      {"potentially_visible", potential_visible_set(cfg, e.group)},
                      {"core", e.core},
                      {"periphery", e.periphery},
                      {"total_source", e.total_source()},
                      {"fully_connected", fully_connected(e)},
                      {"certificate", certificate_json(cert)},
                      {"meta",
                       {{"iterations", e.meta.iterations},
                        {"residual", e.meta.residual},
                        {"path", e.meta.path},
                        {"multiple", e.meta.multiple},
                        {"starts_run", e.meta.starts_run},
                        {"starts_converged", e.meta.starts_converged},
                        {"distinct_fixed_points", e.meta.distinct_fixed_points}}}});
    for (std::size_t i : e.group.members) {
      const StageOneUtility u = stage1_utility(sol.profile, cfg, i);
      const std::string side_s = to_string(cfg.players[i].side);
      players.push_back({{"player", i},
                         {"side", side_s},
                         {"group", group_label(e.group)},
                         {"x_source", e.x_source[i]},
                         {"in_core", e.in_core(i)},
                         {"multiplier", e.multipliers.at(i)},
                         {"utility", u.value},
                         {"equilibrium_utility", equilibrium_utility(e, cfg, i)},
                         {"plan", to_string(u.plan)},
                         {"beta_threshold", thr.per_player[i]}});
      csv.add({std::to_string(i), side_s, group_label(e.group), num(e.x_source[i]), e.in_core(i) ? "1" : "0",
               num(e.multipliers.at(i)), num(u.value), to_string(u.plan), std::to_string(e.group.members.size()),
               num(e.total_source())});
    }
  }
  out.doc["groups"] = groups;
  out.doc["players"] = players;
  out.doc["verification"] = {{"pass", ver.pass},
                             {"tol", ver.tol},
                             {"max_gain", ver.max_gain},
                             {"max_profile_deviation", ver.max_profile_deviation}};
  out.doc["beta_threshold"] = thr.global;
  out.doc["attention"] = profile_json(sol.profile);
  out.csv = csv.str();
  return out;
}

Output cmd_check_unique(const Instance& inst, const Overrides& ov) {
  const GameConfig& cfg = inst.game;
  require_two_states(cfg);
  const SolverOptions opts = solver_options(inst, ov);
  Output out;
  out.doc["command"] = "check-unique";
  out.doc["provenance"] = provenance(inst.source, opts);
  CsvTable csv({"group", "kind", "margin", "pv_size"});
  json certs = json::array();
  std::vector<std::pair<std::string, Side>> groups;
  if (cfg.merged) {
    groups.emplace_back("merged", Side::L);
  } else {
    for (Side s : {Side::L, Side::R})
      if (!cfg.side_members(s).empty()) groups.emplace_back(to_string(s), s);
  }
  for (const auto& [label, side] : groups) {
    const UniquenessCertificate c = uniqueness_certificate(cfg, side, opts);
    json j = certificate_json(c);
    j["group"] = label;
    certs.push_back(j);
    csv.add({label, to_string(c.kind), num(c.margin), std::to_string(c.pv_size)});
  }
  out.doc["certificates"] = certs;
  out.csv = csv.str();
  return out;
}

Output cmd_compstat(const Instance& inst, std::size_t player, const std::string& param,
                    std::optional<std::size_t> sender, const Overrides& ov) {
  const GameConfig& cfg = inst.game;
  require_two_states(cfg);
  if (player >= cfg.size()) throw ValidationError("--player: index out of range");
  if (param != "tau" && param != "lambda" && param != "pairwise")
    throw ValidationError("--param: expected tau, lambda or pairwise");
  if (param == "pairwise" && (!sender || *sender >= cfg.size() || *sender == player))
    throw ValidationError("--sender: pairwise needs a sender index different from --player");

  const SolverOptions opts = solver_options(inst, ov);
  const Group group = cfg.merged ? merged_group(cfg) : side_group(cfg, cfg.players[player].side);
  const Equilibrium eqm = solve_group(cfg, group, opts);
  if (eqm.meta.multiple) throw PreconditionError("compstat: equilibrium is not unique");
  const InfluenceSystem sys = influence_system(eqm, cfg);

  GradientReport rep;
  std::vector<double> fd;
  Output out;
  out.doc["command"] = "compstat";
  out.doc["provenance"] = provenance(inst.source, opts);
  SolverOptions fd_opts = opts;
  if (param == "tau") {
    rep = grad_bandwidth(sys, player);
    fd = resolve_difference(cfg, eqm, Param::tau, player, 1e-5, std::nullopt, fd_opts);
    const AggregateGradient ag = aggregate_attention_gradient(sys, cfg, player, Param::tau);
    out.doc["aggregate"] = {{"value", ag.value}, {"sign_guaranteed", ag.sign_guaranteed}, {"note", ag.note}};
  } else if (param == "lambda") {
    rep = grad_visibility(sys, player);
    fd = resolve_difference(cfg, eqm, Param::lambda, player, 1e-5, std::nullopt, fd_opts);
    const AggregateGradient ag = aggregate_attention_gradient(sys, cfg, player, Param::lambda);
    out.doc["aggregate"] = {{"value", ag.value}, {"sign_guaranteed", ag.sign_guaranteed}, {"note", ag.note}};
    out.doc["kappa"] = sys.kappa[member_position(sys, player)];
  } else {
    const PairwiseGradientReport pr = pairwise_gradients(eqm, cfg, player, *sender);
    rep = pr.report;
    fd = resolve_difference(cfg, eqm, Param::lambda, player, 1e-5, sender, fd_opts);
    out.doc["kappa"] = pr.kappa;
    out.doc["matrix_properties"] = {{"positive_diagonal", pr.properties.positive_diagonal},
                                    {"negative_offdiagonal", pr.properties.negative_offdiagonal},
                                    {"positive_row_sums", pr.properties.positive_row_sums},
                                    {"assumption_holds", pr.assumption_holds}};
  }

  CsvTable csv({"member", "dx_source", "dx_source_fd", "rel_err"});
  json rows = json::array();
  double worst = 0.0;
  for (std::size_t k = 0; k < rep.members.size(); ++k) {
    const std::size_t m = rep.members[k];
    const double e = rel_err(rep.dx_source[k], fd[m]);
    worst = std::max(worst, e);
    rows.push_back({{"member", m}, {"dx_source", rep.dx_source[k]}, {"dx_source_fd", fd[m]}, {"rel_err", e}});
    csv.add({std::to_string(m), num(rep.dx_source[k]), num(fd[m]), num(e)});
  }
  out.doc["player"] = player;
  out.doc["param"] = param;
  if (sender) out.doc["sender"] = *sender;
  out.doc["core"] = sys.members;
  out.doc["restricted_to_core"] = sys.restricted;
  out.doc["gradient"] = rows;
  out.doc["dx_network"] = matrix_json(rep.dx_network);
  out.doc["d_aggregate"] = rep.d_aggregate;
  out.doc["sign_case"] = rep.sign_case ? json(to_string(*rep.sign_case)) : json(nullptr);
  out.doc["max_rel_err_fd"] = worst;
  out.doc["inverse_agreement"] = sys.agreement;
  out.doc["det"] = sys.det;
  out.csv = csv.str();
  return out;
}

Output cmd_planner(double lambda, double tau, int n, double beta) {
  const json input = {{"lambda", lambda}, {"tau", tau}, {"N", n}, {"beta", beta}};
  const double threshold = tau_threshold(lambda, n);
  const EfficientProfile e = solve_efficient(lambda, tau, n);
  if (!e.valid) throw PreconditionError("planner: " + e.reason);
  const EfficiencyGap gap = efficiency_gap(lambda, tau, n, beta);
  const GameConfig cfg = symmetric_game(lambda, tau, n, beta);
  const double kkt = planner_kkt_residual(symmetric_profile(cfg, e), cfg);

  Output out;
  out.doc = {{"command", "planner"},
             {"provenance", provenance(input, std::nullopt)},
             {"input", input},
             {"tau_threshold", threshold},
             {"efficient",
              {{"x_star", e.x_star}, {"y_star", e.y_star}, {"z_star", e.z_star}, {"delta_star", e.delta_star},
               {"a", e.a}, {"b", e.b}, {"c", e.c}, {"d", e.d}, {"budget_residual", e.budget_residual},
               {"kkt_residual", kkt}}},
             {"welfare_efficient", gap.welfare_efficient},
             {"welfare_equilibrium", gap.welfare_equilibrium},
             {"gap", gap.gap},
             {"relative_gap", gap.relative}};
  CsvTable csv({"lambda", "tau", "N", "beta", "tau_threshold", "x_star", "y_star", "z_star", "delta_star",
                "welfare_efficient", "welfare_equilibrium", "gap", "relative_gap", "kkt_residual"});
  csv.add({num(lambda), num(tau), std::to_string(n), num(beta), num(threshold), num(e.x_star), num(e.y_star),
           num(e.z_star), num(e.delta_star), num(gap.welfare_efficient), num(gap.welfare_equilibrium), num(gap.gap),
           num(gap.relative), num(kkt)});
  out.csv = csv.str();
  return out;
}

Output cmd_simulate(const Instance& inst, std::uint64_t draws, std::uint64_t seed, const Overrides& ov) {
  const GameConfig& cfg = inst.game;
  require_two_states(cfg);
  const SolverOptions opts = solver_options(inst, ov);
  const GameSolution sol = solve_game(cfg, opts);
  const SimReport rep = simulate(sol.profile, cfg, draws, seed);
  const Comparison cmp = compare_analytic(rep);

  Output out;
  out.doc["command"] = "simulate";
  out.doc["provenance"] = provenance(inst.source, opts);
  out.doc["draws"] = draws;
  out.doc["seed"] = seed;
  CsvTable csv({"player", "state", "samples", "uninformed", "estimate", "std_error", "analytic", "z"});
  json cells = json::array();
  for (const SimCell& c : rep.cells) {
    const std::string st = c.state == State::L ? "L" : "R";
    cells.push_back({{"player", c.player}, {"state", st}, {"samples", c.samples}, {"uninformed", c.uninformed},
                     {"estimate", c.estimate}, {"std_error", c.std_error}, {"analytic", c.analytic}, {"z", c.z}});
    csv.add({std::to_string(c.player), st, std::to_string(c.samples), std::to_string(c.uninformed), num(c.estimate),
             num(c.std_error), num(c.analytic), num(c.z)});
  }
  json util = json::array();
  for (std::size_t i = 0; i < rep.utility.size(); ++i)
    util.push_back({{"player", i}, {"plan", to_string(rep.plans[i])}, {"estimate", rep.utility[i]},
                    {"analytic", rep.analytic_utility[i]}});
  out.doc["cells"] = cells;
  out.doc["utilities"] = util;
  out.doc["comparison"] = {{"pass", cmp.pass}, {"max_abs_z", cmp.max_abs_z}, {"coverage", cmp.coverage},
                           {"flagged", cmp.flagged}};
  out.csv = csv.str();
  return out;
}

Output cmd_mstate(int m, int n, double lambda, double tau, double beta) {
  const MStateParams p{m, n, lambda, tau, beta};
  const json input = {{"M", m}, {"N", n}, {"lambda", lambda}, {"tau", tau}, {"beta", beta}};
  const MStateSolution s = solve_m_state(p);
  const double kkt = m_state_kkt_residual(m_state_profile(p, s), p);
  Output out;
  out.doc = {{"command", "mstate"},
             {"provenance", provenance(input, std::nullopt)},
             {"input", input},
             {"delta_star", s.delta_star},
             {"x_star", s.x_star},
             {"y_star", s.y_star},
             {"z_star", s.z_star},
             {"budget_residual", s.budget_residual},
             {"kkt_residual", kkt}};
  CsvTable csv({"M", "N", "lambda", "tau", "beta", "delta_star", "x_star", "y_star", "z_star", "budget_residual",
                "kkt_residual"});
  csv.add({std::to_string(m), std::to_string(n), num(lambda), num(tau), num(beta), num(s.delta_star), num(s.x_star),
           num(s.y_star), num(s.z_star), num(s.budget_residual), num(kkt)});
  out.csv = csv.str();
  return out;
}

std::string Axis::label() const { return player ? param + "@" + std::to_string(*player) : param; }

Axis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw ValidationError("--axis " + spec + ": expected param[@player]=values");
  Axis a;
  std::string head = spec.substr(0, eq);
  const std::string body = spec.substr(eq + 1);
  if (const auto at = head.find('@'); at != std::string::npos) {
    try {
      a.player = std::stoul(head.substr(at + 1));
    } catch (const std::exception&) {
      throw ValidationError("--axis " + spec + ": bad player index");
    }
    head = head.substr(0, at);
  }
  if (head != "N" && head != "lambda" && head != "tau" && head != "nu")
    throw ValidationError("--axis " + spec + ": param must be N, lambda, tau or nu");
  if ((head == "N" || head == "nu") && a.player)
    throw ValidationError("--axis " + spec + ": " + head + " is not per player");
  a.param = head;
  auto to_d = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ValidationError("--axis " + spec + ": bad number '" + s + "'");
    }
  };
  if (body.empty()) throw ValidationError("--axis " + spec + ": empty axis");
  if (std::count(body.begin(), body.end(), ':') == 2) {
    const auto c1 = body.find(':');
    const auto c2 = body.find(':', c1 + 1);
    const double start = to_d(body.substr(0, c1));
    const double stop = to_d(body.substr(c1 + 1, c2 - c1 - 1));
    const double step = to_d(body.substr(c2 + 1));
    if (!(step > 0.0)) throw ValidationError("--axis " + spec + ": step must be positive");
    for (long k = 0;; ++k) {
      const double v = start + static_cast<double>(k) * step;
      if (v > stop + 1e-9 * step) break;
      a.values.push_back(v);
    }
  } else {
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) a.values.push_back(to_d(item));
  }
  if (a.values.empty()) throw ValidationError("--axis " + spec + ": empty axis");
  if (head == "N")
    for (double v : a.values)
      if (v < 1.0 || v != std::floor(v)) throw ValidationError("--axis " + spec + ": N values must be positive integers");
  return a;
}

Output cmd_sweep(const json& template_doc, const std::vector<Axis>& axes, const Overrides& ov) {
  if (axes.empty()) throw ValidationError("sweep: at least one --axis is required");
  instance_from_json(template_doc);  // the template itself must be valid

  std::vector<std::string> header{"cell"};
  for (const Axis& a : axes) header.push_back(a.label());
  for (const char* c : {"player", "side", "group", "x_source", "in_core", "utility", "group_size", "group_total_source"})
    header.emplace_back(c);
  CsvTable csv(header);
  json cells = json::array();

  std::vector<std::size_t> idx(axes.size(), 0);
  for (std::size_t cell = 0;; ++cell) {
    json doc = template_doc;
    json& players = doc["game"]["players"];
    std::vector<std::string> keys;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const Axis& ax = axes[a];
      const double v = ax.values[idx[a]];
      keys.push_back(num(v));
      if (ax.param == "nu") {
        doc["game"]["nu"] = v;
      } else if (ax.param == "N") {
        for (json& p : players) p["count"] = static_cast<std::int64_t>(v);
      } else {
        if (ax.player && *ax.player >= players.size())
          throw ValidationError("--axis " + ax.label() + ": template has no such player entry");
        for (std::size_t k = 0; k < players.size(); ++k)
          if (!ax.player || *ax.player == k) players[k][ax.param] = v;
      }
    }
    const Instance inst = instance_from_json(doc);
    const Output solved = cmd_solve(inst, ov);
    json cj = {{"cell", cell}, {"groups", solved.doc["groups"]}, {"players", solved.doc["players"]}};
    for (std::size_t a = 0; a < axes.size(); ++a) cj[axes[a].label()] = axes[a].values[idx[a]];
    cells.push_back(cj);
    for (const json& p : solved.doc["players"]) {
      const std::string group = p["group"];
      std::size_t size = 0;
      double total = 0.0;
      for (const json& g : solved.doc["groups"])
        if (g["group"] == group) {
          size = g["members"].size();
          total = g["total_source"];
        }
      std::vector<std::string> row{std::to_string(cell)};
      row.insert(row.end(), keys.begin(), keys.end());
      row.push_back(std::to_string(p["player"].get<std::size_t>()));
      row.push_back(p["side"]);
      row.push_back(group);
      row.push_back(num(p["x_source"].get<double>()));
      row.push_back(p["in_core"].get<bool>() ? "1" : "0");
      row.push_back(num(p["utility"].get<double>()));
      row.push_back(std::to_string(size));
      row.push_back(num(total));
      csv.add(row);
    }

    bool done = true;
    for (std::size_t a = axes.size(); a-- > 0;) {
      if (++idx[a] < axes[a].values.size()) {
        done = false;
        break;
      }
      idx[a] = 0;
    }
    if (done) break;
  }

  Output out;
  out.doc = {{"command", "sweep"},
             {"provenance", provenance(template_doc, solver_options(instance_from_json(template_doc), ov))},
             {"cells", cells}};
  out.csv = csv.str();
  return out;
}

}  // namespace echoeq
