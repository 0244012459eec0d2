#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "json.hpp"
#include "sdym/cli.hpp"

using nlohmann::json;

namespace {

std::size_t probes_in(const json& report) {
  std::string name = report["checks"].at(0)["name"];
  std::smatch m;
  std::regex re("\\((\\d+) probes\\)");
  return std::regex_search(name, m, re) ? std::stoul(m[1]) : 0;
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = sdym::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << content;
  return p;
}

// all numbers that follow "value=" in a text report
std::vector<std::string> text_values(const std::string& s) {
  std::vector<std::string> v;
  std::regex re("value=(\\S+)");
  for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it) {
    v.push_back((*it)[1]);
  }
  return v;
}

}  // namespace

TEST(Cli, ApplyRecursionPrintsExpression) {
  CliRun r = run({"apply-recursion", "--seed", "M", "--n", "1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "[X, M]\n");
  CliRun z = run({"apply-recursion", "--seed", "X_z", "--n", "1"});
  EXPECT_EQ(z.out, "X_y\n");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"no-such-command"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"apply-recursion", "--seed", "X_("}).code, 3);
  EXPECT_EQ(run({"--grid", "2", "apply-recursion", "--seed", "M"}).code, 4);
  EXPECT_EQ(run({"--format", "yaml", "apply-recursion", "--seed", "M"}).code, 4);
  EXPECT_EQ(run({"check-solution", "--snapshot", "/nonexistent/snap.txt"}).code, 5);
  EXPECT_EQ(run({"check-symmetry", "--expr", "X*X"}).code, 1);
  EXPECT_EQ(run({"check-symmetry", "--expr", "X_y"}).code, 0);
  EXPECT_EQ(run({"lemma17", "--phi", "X_y", "--probe", "M"}).code, 0);
}

TEST(Cli, WrongTargetIsAContractViolation) {
  CliRun r = run({"bracket", "--a", "M", "--b", "J*M"});
  EXPECT_EQ(r.code, 4);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, TextAndJsonCarryTheSameValues) {
  std::vector<std::string> args{"check-solution", "--family", "shear", "--grid", "6"};
  CliRun text = run(args);
  args.insert(args.begin(), {"--format", "json"});
  CliRun js = run(args);
  ASSERT_EQ(text.code, 0) << text.err;
  ASSERT_EQ(js.code, 0) << js.err;
  json j = json::parse(js.out);
  std::vector<std::string> from_json;
  for (const auto& c : j["checks"]) {
    if (c.contains("value") && !c["value"].is_null()) from_json.push_back(c["value"].dump());
  }
  EXPECT_EQ(text_values(text.out), from_json);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_TRUE(j["summary"]["ok"].get<bool>());
}

TEST(Cli, DeterministicGivenSeed) {
  std::vector<std::string> args{"--format", "json", "--seed-rng", "7", "--probes", "5", "identity5"};
  CliRun a = run(args);
  CliRun b = run(args);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(json::parse(a.out)["random_seed"], 7);
  EXPECT_EQ(probes_in(json::parse(a.out)), 5u);
}

TEST(Cli, ConfigFileAndPrecedence) {
  auto cfg = temp_file("sdym_cli_test_cfg.json", R"({"probes": 3, "random_seed": 11})");
  CliRun r = run({"--config", cfg.string(), "--format", "json", "zero-curvature"});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  EXPECT_EQ(probes_in(j), 3u);
  EXPECT_EQ(j["random_seed"], 11);
  // flags override the file
  CliRun o = run({"--config", cfg.string(), "--probes", "2", "--format", "json", "zero-curvature"});
  EXPECT_EQ(probes_in(json::parse(o.out)), 2u);

  auto bad = temp_file("sdym_cli_test_bad.json", R"({"probes": 3, "colour": "red"})");
  EXPECT_EQ(run({"--config", bad.string(), "identity5"}).code, 4);
  auto broken = temp_file("sdym_cli_test_broken.json", "{ probes ");
  EXPECT_EQ(run({"--config", broken.string(), "identity5"}).code, 4);
  EXPECT_EQ(run({"--config", "/nonexistent/cfg.json", "identity5"}).code, 5);
}

TEST(Cli, ConfigFromEnvironment) {
  auto cfg = temp_file("sdym_cli_test_env.json", R"({"probes": 4})");
  ::setenv(sdym::cli::kConfigEnv, cfg.string().c_str(), 1);
  CliRun r = run({"--format", "json", "identity5"});
  ::unsetenv(sdym::cli::kConfigEnv);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(probes_in(json::parse(r.out)), 4u);
}

TEST(Cli, SnapshotRoundTrip) {
  auto p = std::filesystem::temp_directory_path() / "sdym_cli_test_snapshot.txt";
  CliRun w = run({"check-solution", "--family", "abelian", "--grid", "7", "--write-snapshot", p.string()});
  ASSERT_EQ(w.code, 0) << w.err;
  CliRun r = run({"check-solution", "--snapshot", p.string()});
  EXPECT_EQ(r.code, 0) << r.out;
}

TEST(Cli, JsonReportHasSchemaKeys) {
  CliRun r = run({"--format", "json", "bracket", "--a", "J*M", "--b", "J*N"});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  for (const char* k : {"schema_version", "command", "random_seed", "config", "outputs", "checks",
                        "suites", "summary"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  std::ifstream schema(SDYM_SCHEMA_PATH);
  json s = json::parse(schema);
  for (auto& [k, v] : j.items()) EXPECT_TRUE(s["properties"].contains(k)) << k;
}
