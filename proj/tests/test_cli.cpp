#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

using nlohmann::json;

namespace {

const std::string kTool = POALAB_PATH;
const std::string kGames = GAMES_DIR;

struct Output {
  int code;
  std::string out;
};

Output run(const std::string& args) {
  const std::string cmd = kTool + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string temp_file(const std::string& name, const std::string& content = "") {
  const std::string path = ::testing::TempDir() + name;
  if (!content.empty()) std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST(Cli, PoaOfPigou) {
  const Output r = run("poa --game " + kGames + "/pigou.json");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NEAR(json::parse(r.out)["poa"].get<double>(), 4.0 / 3.0, 1e-6);
}

TEST(Cli, SolveReportsFlows) {
  const Output r = run("solve --game " + kGames + "/shifted_pair.json");
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["arc_flows"]["upper"].get<double>(), 0.505, 1e-8);
  EXPECT_NEAR(j["path_flows"][1]["flow"].get<double>(), 0.495, 1e-8);
}

TEST(Cli, DistOfShiftedPair) {
  const Output r = run("dist --game-a " + kGames + "/linear_pair.json --game-b " + kGames + "/shifted_pair.json");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NEAR(json::parse(r.out)["value"].get<double>(), 0.01, 1e-15);
}

TEST(Cli, SweepThenFit) {
  const std::string csv = temp_file("shifted_sweep.csv");
  const Output s = run("sweep --game " + kGames + "/shifted_pair.json --kind cost --seed 3 --out " + csv);
  ASSERT_EQ(s.code, 0) << s.out;
  std::ifstream manifest(csv + ".manifest.json");
  EXPECT_TRUE(manifest.good());
  const Output f = run("holder-fit --in " + csv);
  ASSERT_EQ(f.code, 0) << f.out;
  EXPECT_GE(json::parse(f.out)["gamma"].get<double>(), 0.9);
}

TEST(Cli, ConvergeDown) {
  const std::string csv = temp_file("bpr_down.csv");
  const Output r = run("converge --game " + kGames + "/bpr_light.json --direction down --totals 0.1,0.01,0.001,0.0001 --out " + csv);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(json::parse(r.out)["bounds_hold"].get<bool>());
}

TEST(Cli, CheckPasses) {
  for (const char* g : {"pigou", "braess", "shifted_pair"}) {
    const Output r = run(std::string("check --game ") + kGames + "/" + g + ".json");
    EXPECT_EQ(r.code, 0) << g << ": " << r.out;
  }
}

TEST(Cli, SchemaErrorExitCode) {
  const std::string bad = temp_file("bad.json", R"({"schema": 1, "structure": {}})");
  const Output r = run("poa --game " + bad);
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.out)["error"], "schema");
}

TEST(Cli, ConditionErrorsAreDistinct) {
  const std::string one = temp_file(
      "cond1.json",
      R"({"schema": 1, "structure": {"arcs": ["a"], "od_pairs": [{"id": "st", "demand": 1, "paths": [["a"]]}]},
          "costs": {"a": {"family": "constant", "params": {"c": 1}}}})");
  const std::string two = temp_file(
      "cond2.json",
      R"({"schema": 1, "structure": {"arcs": ["a", "b"], "od_pairs": [{"id": "st", "demand": 0, "paths": [["a"], ["b"]]}]},
          "costs": {"a": {"family": "constant", "params": {"c": 1}}, "b": {"family": "constant", "params": {"c": 1}}}})");
  const Output r1 = run("poa --game " + one), r2 = run("poa --game " + two);
  EXPECT_EQ(r1.code, 2);
  EXPECT_EQ(r2.code, 2);
  EXPECT_EQ(json::parse(r1.out)["error"], "bad_structure");
  EXPECT_EQ(json::parse(r2.out)["error"], "degenerate");
}

TEST(Cli, UnconvergedExitCode) {
  const Output r = run("solve --game " + kGames + "/braess.json --frank-wolfe --tol 1e-300");
  EXPECT_EQ(r.code, 3) << r.out;
}
