#include "echo/comparative_statics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace echo {

std::string to_string(SignCase s) {
  switch (s) {
    case SignCase::a: return "a";
    case SignCase::b: return "b";
    case SignCase::c: return "c";
  }
  return "c";
}

std::string to_string(Param p) { return p == Param::tau ? "tau" : "lambda"; }

namespace {

Eigen::VectorXd unit(Eigen::Index n, Eigen::Index i) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e(i) = 1.0;
  return e;
}

// ∂x_a^b = G_ab·∂x_b for every attended pair.
Eigen::MatrixXd network_derivative(const Eigen::MatrixXd& G, const Eigen::VectorXd& dx) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(G.rows(), G.cols());
  for (Eigen::Index a = 0; a < G.rows(); ++a)
    for (Eigen::Index b = 0; b < G.cols(); ++b)
      if (a != b) d(a, b) = G(a, b) * dx(b);
  return d;
}

GradientReport make_report(const InfluenceSystem& sys, const Eigen::VectorXd& dx, Eigen::MatrixXd net) {
  GradientReport r;
  r.members = sys.members;
  r.dx_source.assign(dx.data(), dx.data() + dx.size());
  r.dx_network = std::move(net);
  r.d_aggregate = dx.sum();
  return r;
}

SignCase classify(double kappa, double own) {
  if (std::abs(kappa) < kKappaZeroTol) return SignCase::c;
  return own > 0.0 ? SignCase::a : SignCase::b;
}

}  // namespace

GradientReport grad_bandwidth(const InfluenceSystem& sys, std::size_t i) {
  const auto p = static_cast<Eigen::Index>(member_position(sys, i));
  const Eigen::VectorXd dx = sys.A_inv.col(p);
  return make_report(sys, dx, network_derivative(sys.G, dx));
}

GradientReport grad_visibility(const InfluenceSystem& sys, std::size_t i) {
  const std::size_t pos = member_position(sys, i);
  const auto p = static_cast<Eigen::Index>(pos);
  const auto n = static_cast<Eigen::Index>(sys.members.size());
  const double kappa = sys.kappa[pos];
  const Eigen::VectorXd v = Eigen::VectorXd::Ones(n) - unit(n, p);
  const Eigen::VectorXd dx = kappa * (sys.A_inv * v);
  Eigen::MatrixXd net = network_derivative(sys.G, dx);
  for (Eigen::Index a = 0; a < n; ++a)
    if (a != p) net(a, p) -= kappa;
  GradientReport r = make_report(sys, dx, std::move(net));
  r.sign_case = classify(kappa, dx(p));
  if (*r.sign_case == SignCase::c) {
    std::fill(r.dx_source.begin(), r.dx_source.end(), 0.0);
    r.dx_network.setZero();
    r.d_aggregate = 0.0;
  }
  return r;
}

AggregateGradient aggregate_attention_gradient(const InfluenceSystem& sys, const GameConfig& cfg,
                                               std::size_t i, Param param) {
  const std::size_t pos = member_position(sys, i);
  const auto p = static_cast<Eigen::Index>(pos);
  AggregateGradient out;
  const double col = sys.A_inv.col(p).sum();
  if (param == Param::tau) {
    out.value = col;
  } else {
    out.value = sys.kappa[pos] * (sys.A_inv.sum() - col);
  }
  const auto& p0 = cfg.players[sys.members.front()];
  const bool homogeneous =
      !sys.pairwise && std::all_of(sys.members.begin(), sys.members.end(), [&](std::size_t j) {
        return cfg.players[j].lambda == p0.lambda && cfg.players[j].tau == p0.tau &&
               cfg.players[j].tau_floor == p0.tau_floor;
      });
  out.sign_guaranteed = !sys.pairwise && (sys.members.size() == 2 || homogeneous);
  out.note = out.sign_guaranteed ? (sys.members.size() == 2 ? "two players" : "homogeneous players")
                                 : "sign not guaranteed";
  return out;
}

PeripheralGradients peripheral_gradients(const Equilibrium& eqm, const GameConfig& cfg, std::size_t k,
                                         std::size_t i) {
  if (eqm.meta.multiple)
    throw PreconditionError("peripheral_gradients: equilibrium is not unique");
  if (eqm.core.size() < 2) throw PreconditionError("peripheral_gradients: core has fewer than two players");
  if (std::find(eqm.periphery.begin(), eqm.periphery.end(), k) == eqm.periphery.end())
    throw PreconditionError("peripheral_gradients: player " + std::to_string(k) + " is not peripheral");
  const double nu = cfg.nu;
  const auto mk = eqm.multipliers.find(k);
  if (mk == eqm.multipliers.end() || mk->second > nu * (1.0 + 1e-12) || !(eqm.x_source[k] > cfg.floor_of(k)))
    throw PreconditionError("peripheral_gradients: player " + std::to_string(k) +
                            " pays no attention to the source");
  const double margin = eqm.x_source[k] - visibility_threshold(cfg.players[k].lambda, nu).value();
  if (std::abs(margin) <= 1e-9)
    throw PreconditionError("peripheral_gradients: player " + std::to_string(k) + " is borderline");

  const InfluenceSystem sys = influence_system(eqm, cfg);
  const std::size_t pos = member_position(sys, i);
  const auto p = static_cast<Eigen::Index>(pos);
  const auto n = static_cast<Eigen::Index>(sys.members.size());
  const double kappa = sys.kappa[pos];

  // Slopes of k's attention to each core member.
  Eigen::VectorXd gk(n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const std::size_t j = sys.members[static_cast<std::size_t>(b)];
    gk(b) = influence_slope(eqm.x_source[j], cfg.visibility(k, j), nu);
  }

  const Eigen::VectorXd dtau = sys.A_inv.col(p);
  const Eigen::VectorXd dlam = kappa * (sys.A_inv * (Eigen::VectorXd::Ones(n) - unit(n, p)));

  PeripheralGradients out;
  out.k = k;
  out.i = i;
  out.core = sys.members;
  out.dsource_dtau = -gk.dot(dtau);
  out.dsource_dlambda = -gk.dot(dlam) + kappa;
  for (Eigen::Index b = 0; b < n; ++b) {
    out.dpeer_dtau.push_back(gk(b) * dtau(b));
    out.dpeer_dlambda.push_back(gk(b) * dlam(b) - (b == p ? kappa : 0.0));
  }
  return out;
}

PairwiseGradientReport pairwise_gradients(const Equilibrium& eqm, const GameConfig& cfg, std::size_t i,
                                          std::size_t j) {
  if (i == j) throw ValidationError("pairwise_gradients: receiver and sender coincide");
  const InfluenceSystem sys = influence_system(eqm, cfg);
  const std::size_t pi = member_position(sys, i);
  const std::size_t pj = member_position(sys, j);

  PairwiseGradientReport out;
  out.properties = check_properties(sys.A_inv);
  out.assumption_holds = out.properties.all();
  out.kappa = -influence_lambda(eqm.x_source[j], cfg.visibility(i, j), cfg.nu);

  const Eigen::VectorXd dx = out.kappa * sys.A_inv.col(static_cast<Eigen::Index>(pi));
  Eigen::MatrixXd net = network_derivative(sys.G, dx);
  net(static_cast<Eigen::Index>(pi), static_cast<Eigen::Index>(pj)) -= out.kappa;
  out.report = make_report(sys, dx, std::move(net));
  if (out.assumption_holds) out.report.sign_case = classify(out.kappa, dx(static_cast<Eigen::Index>(pi)));
  return out;
}

GameConfig perturbed(const GameConfig& cfg, Param param, std::size_t i, double delta,
                     std::optional<std::size_t> sender) {
  GameConfig c = cfg;
  if (i >= c.size()) throw ValidationError("perturbed: player index out of range");
  PlayerParams& p = c.players[i];
  if (param == Param::tau) {
    p.tau += delta;
  } else if (sender) {
    if (p.pairwise_lambda.empty()) {
      p.pairwise_lambda.resize(c.size());
      for (std::size_t j = 0; j < c.size(); ++j) p.pairwise_lambda[j] = cfg.visibility(i, j);
    }
    p.pairwise_lambda.at(*sender) += delta;
  } else {
    p.lambda += delta;
    for (PlayerParams& q : c.players)
      if (!q.pairwise_lambda.empty()) q.pairwise_lambda[i] += delta;
  }
  return c;
}

std::vector<double> resolve_difference(const GameConfig& cfg, const Equilibrium& eqm, Param param,
                                       std::size_t i, double step, std::optional<std::size_t> sender,
                                       SolverOptions opts) {
  const std::vector<std::size_t> pv = potential_visible_set(cfg, eqm.group);
  auto solve_at = [&](double delta) {
    const GameConfig c = perturbed(cfg, param, i, delta, sender);
    SolverOptions o = opts;
    if (potential_visible_set(c, eqm.group) == pv) {
      std::vector<double> init;
      for (std::size_t j : pv) init.push_back(eqm.x_source[j]);
      o.initial = std::move(init);
    }
    return solve_group(c, eqm.group, o).x_source;
  };
  const std::vector<double> up = solve_at(step);
  const std::vector<double> down = solve_at(-step);
  std::vector<double> d(up.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = (up[k] - down[k]) / (2.0 * step);
  return d;
}

std::vector<GradientReport> gradient_batch(const InfluenceSystem& sys, Param param) {
  std::vector<std::future<GradientReport>> jobs;
  for (std::size_t i : sys.members)
    jobs.push_back(std::async(std::launch::async, [&sys, param, i] {
      return param == Param::tau ? grad_bandwidth(sys, i) : grad_visibility(sys, i);
    }));
  std::vector<GradientReport> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace echo
