#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include <lplab/lplab.hpp>

using namespace lplab;

namespace {

const char* kMinimal = R"({
  "command": "norm",
  "grid": {"dim": 1, "N": 256, "B": 1.0},
  "space": {"s": 0.5, "p": 2, "q": 2, "L": 1},
  "characterizations": ["lp"],
  "corpus": [{"family": "gaussian", "id": "gauss", "sigma": 0.05}]
})";

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("lplab_report_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(LPLAB_CLI) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Report, MinimalConfig) {
  RunResult r = run_config(parse_config_text(kMinimal));
  EXPECT_EQ(r.status, 0);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].function_id, "gauss");
  EXPECT_EQ(r.rows[0].characterization, "lp");
  EXPECT_EQ(r.rows[0].flag, "OK");
  EXPECT_GT(r.rows[0].value, 0.0);
}

TEST(Report, CsvHeaderAndFlagColumn) {
  RunResult r = run_config(parse_config_text(kMinimal));
  std::string csv = csv_text(r.rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "function_id,characterization,s,p,q,L,value,flag");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) EXPECT_EQ(std::count(line.begin(), line.end(), ','), 7) << line;
}

TEST(Report, GridFieldsHonored) {
  json j = json::parse(kMinimal);
  j["grid"] = {{"dim", 2}, {"N", 64}, {"B", 2.0}};
  j["corpus"][0]["sigma"] = 0.2;
  RunConfig c = parse_config(j);
  EXPECT_EQ(c.grid.dim, 2);
  EXPECT_EQ(c.grid.N, 64);
  EXPECT_EQ(c.grid.B, 2.0);
  j["grid"]["N"] = 64.5;
  EXPECT_THROW(parse_config(j), Error);
}

TEST(Report, ZeroExponentRejected) {
  json j = json::parse(kMinimal);
  j["space"]["p"] = 0;
  try {
    parse_config(j);
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigParseError);
  }
}

TEST(Report, UnknownKeyRejected) {
  json j = json::parse(kMinimal);
  j["grid"]["spacing"] = 1;
  EXPECT_THROW(parse_config(j), Error);
  j = json::parse(kMinimal);
  j["bogus"] = true;
  EXPECT_THROW(parse_config(j), Error);
}

TEST(Report, BadJsonRejected) {
  try {
    parse_config_text("{\"command\": ");
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigParseError);
  }
}

TEST(Report, EquivalenceTwelveRows) {
  RunConfig c = load_config(std::string(LPLAB_CONFIGS) + "/t2_equivalence.json");
  RunResult r = run_config(c);
  EXPECT_EQ(r.rows.size(), 12u);
  ASSERT_TRUE(r.summary.contains("spread"));
  EXPECT_TRUE(r.summary["spread"].is_number());
  EXPECT_EQ(r.verdict, "PASS");
}

TEST(Report, Deterministic) {
  RunConfig c = load_config(std::string(LPLAB_CONFIGS) + "/t2_equivalence.json");
  RunResult a = run_config(c), b = run_config(c);
  EXPECT_EQ(csv_text(a.rows), csv_text(b.rows));
  EXPECT_EQ(summary_text(a), summary_text(b));
}

TEST(Report, SuiteMergesRuns) {
  json j = json::parse(kMinimal);
  j["command"] = "suite";
  j["runs"] = json::array({{{"command", "norm"}, {"name", "a"}},
                           {{"command", "norm"}, {"name", "b"}, {"space", {{"p", 4}}}}});
  RunConfig c = parse_config(j);
  ASSERT_EQ(c.runs.size(), 2u);
  EXPECT_EQ(c.runs[1].space.p, 4.0);
  EXPECT_EQ(c.runs[1].space.s, 0.5);
  RunResult r = run_config(c);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].function_id, "a:gauss");
  EXPECT_NE(r.rows[0].value, r.rows[1].value);
}

TEST(Report, ComputationErrorInSummary) {
  json j = json::parse(kMinimal);
  j["grid"]["dim"] = 1;
  j["characterizations"] = {"max:S"};
  RunResult r = run_config(parse_config(j));
  EXPECT_EQ(r.verdict, "FAIL");
  EXPECT_EQ(r.status, 1);
  ASSERT_TRUE(r.summary.contains("error"));
  EXPECT_EQ(r.summary["error"]["kind"], "DimensionTooLow");
}

TEST(Cli, ExitCodes) {
  auto d = scratch("cli");
  {
    std::ofstream(d / "ok.json") << kMinimal;
    json bad = json::parse(kMinimal);
    bad["space"]["p"] = 0;
    std::ofstream(d / "bad.json") << bad.dump();
  }
  EXPECT_EQ(run_cli("--config " + (d / "ok.json").string() + " --out " + d.string()), 0);
  EXPECT_TRUE(std::filesystem::exists(d / "norm.csv"));
  EXPECT_TRUE(std::filesystem::exists(d / "norm.json"));
  EXPECT_EQ(run_cli("--config " + (d / "bad.json").string() + " --out " + d.string()), 2);
  EXPECT_EQ(run_cli("--config " + (d / "missing.json").string()), 2);
  EXPECT_EQ(run_cli("norm --dim 1 --N 256 --char lp --out " + d.string()), 0);
  EXPECT_EQ(run_cli("norm --p 0 --out " + d.string()), 2);
}

TEST(Cli, EmitMatchesLibrary) {
  auto d = scratch("emit");
  std::ofstream(d / "ok.json") << kMinimal;
  ASSERT_EQ(run_cli("--config " + (d / "ok.json").string() + " --out " + d.string()), 0);
  RunResult r = run_config(parse_config_text(kMinimal));
  EXPECT_EQ(read_all(d / "norm.csv"), csv_text(r.rows));
  EXPECT_EQ(read_all(d / "norm.json"), summary_text(r));
}
