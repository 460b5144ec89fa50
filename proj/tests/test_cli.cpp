#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "echo/errors.hpp"
#include "echoeq/commands.hpp"
#include "echoeq/instance.hpp"

namespace fs = std::filesystem;
using echoeq::json;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string instance_path(const char* name) { return (fs::path(ECHO_INSTANCE_DIR) / name).string(); }

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / ("echoeq_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(ECHOEQ_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string validation_message(const std::string& text) {
  try {
    echoeq::parse_instance(text);
  } catch (const echo::ValidationError& e) {
    return e.what();
  }
  return {};
}

const char* kMinimal = R"({"schema_version": 1, "game": {"players": [
  {"side": "L", "beta": 0.01, "lambda": 3, "tau": 2, "count": 3}]}})";

}  // namespace

TEST(Instance, ParsesAndExpandsCounts) {
  const auto inst = echoeq::parse_instance(kMinimal);
  ASSERT_EQ(inst.game.size(), 3u);
  EXPECT_EQ(inst.game.players[2].lambda, 3.0);
  EXPECT_EQ(inst.game.nu, 1.0);
}

TEST(Instance, UnknownFieldReportsPath) {
  const std::string msg = validation_message(R"({"schema_version": 1, "game": {"players": [
    {"side": "L", "beta": 0.01, "lamda": 3, "tau": 2}]}})");
  EXPECT_EQ(msg.rfind("$.game.players[0].lamda", 0), 0u) << msg;
}

TEST(Instance, OutOfDomainValueReportsPath) {
  const std::string msg = validation_message(R"({"schema_version": 1, "game": {"players": [
    {"side": "L", "beta": 1.5, "lambda": 3, "tau": 2}]}})");
  EXPECT_NE(msg.find("$.game.players[0].beta"), std::string::npos) << msg;
  const std::string side = validation_message(R"({"schema_version": 1, "game": {"players": [
    {"side": "X", "beta": 0.5, "lambda": 3, "tau": 2}]}})");
  EXPECT_NE(side.find("$.game.players[0].side"), std::string::npos) << side;
}

TEST(Instance, SyntaxErrorReportsLine) {
  const std::string msg = validation_message("{\n  \"schema_version\": 1,\n  \"game\": {,\n}");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(Instance, SchemaVersionChecked) {
  const std::string msg = validation_message(R"({"schema_version": 9, "game": {"players": []}})");
  EXPECT_NE(msg.find("schema_version"), std::string::npos) << msg;
}

TEST(Instance, ConfigHashStable) {
  const auto a = echoeq::parse_instance(kMinimal);
  const auto b = echoeq::parse_instance(kMinimal);
  EXPECT_EQ(echoeq::config_hash(a.source), echoeq::config_hash(b.source));
  EXPECT_EQ(echoeq::config_hash(a.source).size(), 16u);
}

TEST(Commands, SolveIsDeterministicAndVerified) {
  const auto inst = echoeq::load_instance(instance_path("two_sided.json"));
  const auto a = echoeq::cmd_solve(inst);
  const auto b = echoeq::cmd_solve(inst);
  EXPECT_EQ(a.doc.dump(), b.doc.dump());
  EXPECT_EQ(a.csv, b.csv);
  EXPECT_TRUE(a.doc["verification"]["pass"].get<bool>());
  EXPECT_TRUE(a.doc["provenance"].contains("config_hash"));
}

TEST(Commands, AnchorTotalsInSolveCsv) {
  json doc = json::parse(read_file(instance_path("anchor_n6.json")));
  for (int n : {5, 6}) {
    doc["game"]["players"][0]["count"] = n;
    const auto out = echoeq::cmd_solve(echoeq::instance_from_json(doc));
    const double total = out.doc["groups"][0]["total_source"];
    EXPECT_NEAR(total, n == 5 ? 3.85 : 4.00, 0.01);
  }
}

TEST(Commands, MergedMatchesOneSided) {
  json merged = json::parse(R"({"schema_version": 1, "game": {"merged": true, "players": [
    {"side": "L", "beta": 0.001, "lambda": 4, "tau": 2, "count": 2},
    {"side": "R", "beta": 0.001, "lambda": 4, "tau": 2, "count": 2}]}})");
  json one = json::parse(R"({"schema_version": 1, "game": {"players": [
    {"side": "L", "beta": 0.001, "lambda": 4, "tau": 2, "count": 4}]}})");
  const auto a = echoeq::cmd_solve(echoeq::instance_from_json(merged));
  const auto b = echoeq::cmd_solve(echoeq::instance_from_json(one));
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_NEAR(a.doc["players"][i]["x_source"].get<double>(), b.doc["players"][i]["x_source"].get<double>(), 1e-9);
}

TEST(Commands, CompstatCarriesFiniteDifferenceCheck) {
  const auto inst = echoeq::load_instance(instance_path("figure_pair.json"));
  const auto out = echoeq::cmd_compstat(inst, 0, "lambda", std::nullopt);
  EXPECT_EQ(out.doc["sign_case"], "a");
  EXPECT_FALSE(out.csv.empty());
  EXPECT_THROW(echoeq::cmd_compstat(inst, 0, "pairwise", std::nullopt), echo::ValidationError);
}

TEST(Commands, SweepAxisParsing) {
  const auto a = echoeq::parse_axis("lambda@0=1.5,2,4");
  EXPECT_EQ(a.param, "lambda");
  ASSERT_TRUE(a.player.has_value());
  EXPECT_EQ(*a.player, 0u);
  EXPECT_EQ(a.values, (std::vector<double>{1.5, 2, 4}));
  const auto b = echoeq::parse_axis("N=2:6:2");
  EXPECT_EQ(b.values, (std::vector<double>{2, 4, 6}));
  EXPECT_THROW(echoeq::parse_axis("lambda="), echo::ValidationError);
  EXPECT_THROW(echoeq::parse_axis("tau=3:1:1"), echo::ValidationError);
  EXPECT_THROW(echoeq::parse_axis("gamma=1"), echo::ValidationError);
}

TEST(Commands, SweepOfNHasDecreasingX) {
  const json doc = json::parse(read_file(instance_path("anchor_n6.json")));
  const auto out = echoeq::cmd_sweep(doc, {echoeq::parse_axis("N=2:12:1")});
  double prev = 1e300;
  for (const json& cell : out.doc["cells"]) {
    const double x = cell["players"][0]["x_source"];
    EXPECT_LT(x, prev);
    prev = x;
  }
}

TEST(Golden, FigureSweep) {
  const json doc = json::parse(read_file(instance_path("figure_pair.json")));
  const auto out = echoeq::cmd_sweep(doc, {echoeq::parse_axis("lambda@0=1.5,2,4")});
  EXPECT_EQ(out.csv, read_file(fs::path(ECHO_GOLDEN_DIR) / "figure_sweep.csv"));
}

TEST(Golden, AnchorSolve) {
  const auto out = echoeq::cmd_solve(echoeq::load_instance(instance_path("anchor_n6.json")));
  EXPECT_EQ(out.csv, read_file(fs::path(ECHO_GOLDEN_DIR) / "anchor_solve.csv"));
}

TEST(ExitCodes, Taxonomy) {
  EXPECT_EQ(run("solve --instance " + instance_path("anchor_n6.json")), 0);
  EXPECT_EQ(run("solve --instance /nonexistent/file.json"), 2);
  EXPECT_EQ(run("solve --instance " + write_temp("bad.json", "{\"schema_version\": 1,").string()), 2);
  EXPECT_EQ(run("solve"), 2);  // missing --instance
  EXPECT_EQ(run("solve --instance " + instance_path("anchor_n6.json") + " --format xml"), 2);
  const auto slow = write_temp("slow.json", R"({"schema_version": 1, "game": {"players": [
    {"side": "L", "beta": 0.01, "lambda": 1.5, "tau": 3, "count": 5}]},
    "solver": {"max_iter": 1, "starts": 1}})");
  EXPECT_EQ(run("solve --instance " + slow.string()), 3);
  // Player 3 of two_sided is peripheral.
  EXPECT_EQ(run("compstat --instance " + instance_path("two_sided.json") + " --player 3 --param tau"), 4);
  EXPECT_EQ(run("planner --lambda 1.5 --tau 5 --N 3"), 4);
  EXPECT_EQ(run("planner --lambda 3 --tau 0.1 --N 2"), 4);
  EXPECT_EQ(run("mstate --M 3 --N 3 --lambda 2 --tau 4"), 0);
  EXPECT_EQ(run("sweep --instance " + instance_path("figure_pair.json") + " --axis lambda="), 2);
}

TEST(ExitCodes, OutputFileWritten) {
  const fs::path out = scratch_dir() / "out.csv";
  ASSERT_EQ(run("solve --instance " + instance_path("anchor_n6.json") + " --format csv --out " + out.string()), 0);
  EXPECT_EQ(read_file(out), echoeq::cmd_solve(echoeq::load_instance(instance_path("anchor_n6.json"))).csv);
  fs::remove_all(scratch_dir());
}
