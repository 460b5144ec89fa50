#include "instance.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "echo/errors.hpp"

namespace echoeq {

namespace {

using echo::ValidationError;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ValidationError(path + ": " + msg);
}

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return it.key() == k; });
    if (!known) fail(path + "." + it.key(), "unknown field");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required field");
  return obj.at(key);
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::int64_t integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<std::int64_t>();
}

double positive(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (!(x > 0.0)) fail(path, "must be positive");
  return x;
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

struct PlayerSpec {
  echo::PlayerParams params;
  std::int64_t count = 1;
  std::vector<double> pairwise;
  std::string path;
};

PlayerSpec parse_player(const json& p, const std::string& path) {
  if (!p.is_object()) fail(path, "expected an object");
  only_keys(p, path, {"side", "beta", "lambda", "tau", "tau_floor", "pairwise_lambda", "count"});
  PlayerSpec s;
  s.path = path;
  const json& side = require(p, path, "side");
  if (side == "L")
    s.params.side = echo::Side::L;
  else if (side == "R")
    s.params.side = echo::Side::R;
  else
    fail(path + ".side", "expected \"L\" or \"R\"");
  s.params.beta = number(require(p, path, "beta"), path + ".beta");
  if (!(s.params.beta > 0.0 && s.params.beta < 1.0)) fail(path + ".beta", "must lie in (0,1)");
  s.params.lambda = positive(require(p, path, "lambda"), path + ".lambda");
  s.params.tau = positive(require(p, path, "tau"), path + ".tau");
  if (p.contains("tau_floor")) {
    const double f = number(p.at("tau_floor"), path + ".tau_floor");
    if (!(f >= 0.0 && f < s.params.tau)) fail(path + ".tau_floor", "must lie in [0, tau)");
    s.params.tau_floor = f;
  }
  if (p.contains("pairwise_lambda")) {
    const json& row = p.at("pairwise_lambda");
    if (!row.is_array()) fail(path + ".pairwise_lambda", "expected an array");
    for (std::size_t k = 0; k < row.size(); ++k)
      s.pairwise.push_back(positive(row[k], path + ".pairwise_lambda[" + std::to_string(k) + "]"));
  }
  if (p.contains("count")) {
    s.count = integer(p.at("count"), path + ".count");
    if (s.count < 1) fail(path + ".count", "must be at least 1");
  }
  return s;
}

}  // namespace

Instance instance_from_json(const json& doc) {
  if (!doc.is_object()) fail("$", "expected an object");
  only_keys(doc, "$", {"schema_version", "game", "solver"});
  const std::int64_t version = integer(require(doc, "$", "schema_version"), "$.schema_version");
  if (version != kSchemaVersion)
    fail("$.schema_version", "unsupported version " + std::to_string(version));

  Instance inst;
  inst.source = doc;
  const json& g = require(doc, "$", "game");
  if (!g.is_object()) fail("$.game", "expected an object");
  only_keys(g, "$.game", {"players", "nu", "M", "K1", "K2", "merged"});
  echo::GameConfig& cfg = inst.game;
  if (g.contains("nu")) cfg.nu = positive(g.at("nu"), "$.game.nu");
  if (g.contains("M")) {
    cfg.num_states = static_cast<int>(integer(g.at("M"), "$.game.M"));
    if (cfg.num_states < 2) fail("$.game.M", "must be at least 2");
  }
  if (g.contains("K1")) {
    cfg.k_left = static_cast<int>(integer(g.at("K1"), "$.game.K1"));
    if (cfg.k_left < 1) fail("$.game.K1", "must be at least 1");
  }
  if (g.contains("K2")) {
    cfg.k_right = static_cast<int>(integer(g.at("K2"), "$.game.K2"));
    if (cfg.k_right < 1) fail("$.game.K2", "must be at least 1");
  }
  if (g.contains("merged")) {
    if (!g.at("merged").is_boolean()) fail("$.game.merged", "expected a boolean");
    cfg.merged = g.at("merged").get<bool>();
  }

  const json& players = require(g, "$.game", "players");
  if (!players.is_array() || players.empty()) fail("$.game.players", "expected a nonempty array");
  std::vector<PlayerSpec> specs;
  std::size_t total = 0;
  for (std::size_t k = 0; k < players.size(); ++k) {
    specs.push_back(parse_player(players[k], "$.game.players[" + std::to_string(k) + "]"));
    total += static_cast<std::size_t>(specs.back().count);
  }
  for (const PlayerSpec& s : specs) {
    if (!s.pairwise.empty() && s.pairwise.size() != total)
      fail(s.path + ".pairwise_lambda", "needs one entry per player (" + std::to_string(total) + ")");
    for (std::int64_t c = 0; c < s.count; ++c) {
      echo::PlayerParams p = s.params;
      p.pairwise_lambda = s.pairwise;
      cfg.players.push_back(p);
    }
  }

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    if (!s.is_object()) fail("$.solver", "expected an object");
    only_keys(s, "$.solver", {"damping", "tol", "max_iter", "starts", "seed"});
    echo::SolverOptions& o = inst.solver;
    if (s.contains("damping")) {
      o.damping = number(s.at("damping"), "$.solver.damping");
      if (!(o.damping > 0.0 && o.damping <= 1.0)) fail("$.solver.damping", "must lie in (0,1]");
    }
    if (s.contains("tol")) {
      o.tol = positive(s.at("tol"), "$.solver.tol");
      o.accept_tol = std::max(o.accept_tol, o.tol);
    }
    if (s.contains("max_iter")) {
      o.max_iter = static_cast<int>(integer(s.at("max_iter"), "$.solver.max_iter"));
      if (o.max_iter < 1) fail("$.solver.max_iter", "must be at least 1");
    }
    if (s.contains("starts")) {
      o.starts = static_cast<int>(integer(s.at("starts"), "$.solver.starts"));
      if (o.starts < 1) fail("$.solver.starts", "must be at least 1");
    }
    if (s.contains("seed")) {
      if (!s.at("seed").is_number_unsigned()) fail("$.solver.seed", "expected a nonnegative integer");
      o.seed = s.at("seed").get<std::uint64_t>();
    }
  }

  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    fail("$.game", e.what());
  }
  return inst;
}

Instance parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": malformed JSON (" +
                          e.what() + ")");
  }
  return instance_from_json(doc);
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open instance file");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_instance(ss.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string config_hash(const json& doc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : doc.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace echoeq
