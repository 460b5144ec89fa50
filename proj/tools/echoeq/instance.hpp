#pragma once

#include <string>

#include <json.hpp>

#include "echo/attention.hpp"
#include "echo/equilibrium.hpp"

namespace echoeq {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct Instance {
  echo::GameConfig game;
  echo::SolverOptions solver;
  json source;  ///< validated document, as read
};

/// Parses and validates an instance document. Errors are ValidationError
/// whose message starts with the offending field path (or line for syntax errors).
Instance parse_instance(const std::string& text);
Instance load_instance(const std::string& path);
Instance instance_from_json(const json& doc);

/// FNV-1a of the canonical (sorted-key, compact) serialization.
std::string config_hash(const json& doc);

}  // namespace echoeq
