// Copyright 2026 The riskbatch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "riskbatch/cli.h"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <vector>

#include "riskbatch/errors.h"
#include "test_util.h"

namespace riskbatch {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "riskbatch");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// A generated stream plus a config that simulates three strategies.
class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::TempDir("cli");
    const CliRun gen = Invoke({"generate", "--out", dir_.string(), "--commits", "400",
                            "--groups", "2,2,2,2", "--positive-rate", "0.03",
                            "--seed", "3"});
    ASSERT_EQ(gen.code, 0) << gen.err;
    WriteConfig(R"("baseline": "twsb",)");
  }

  void WriteConfig(const std::string& extra) {
    std::ofstream(dir_ / "run.json")
        << "{\"stream\": \"stream.jsonl\", \"catalog\": \"catalog.json\", "
           "\"out\": \"out\", " << extra
        << R"( "strategies": [{"kind": "twsb"}, {"kind": "et"},
              {"kind": "rapb-la", "threshold": 1.5, "aging_rate": 0.2}],
              "tune": {"strategies": ["fsb"], "evaluations": 12}})";
  }

  std::string Config() const { return (dir_ / "run.json").string(); }

  fs::path dir_;
};

TEST_F(CliTest, GenerateWritesStreamCatalogAndTruth) {
  EXPECT_TRUE(fs::exists(dir_ / "stream.jsonl"));
  EXPECT_TRUE(fs::exists(dir_ / "catalog.json"));
  const nlohmann::json truth =
      nlohmann::json::parse(testing::ReadFile(dir_ / "truth.json"));
  EXPECT_TRUE(truth.contains("spec"));
  const CommitStream s = LoadStream(dir_ / "stream.jsonl", dir_ / "catalog.json");
  EXPECT_EQ(s.size(), 400u);
  EXPECT_EQ(s.group_count(), 8u);
}

TEST_F(CliTest, SimulateWritesReportsCsvAndEvents) {
  const CliRun r = Invoke({"simulate", "--config", Config(), "--export-events"});
  ASSERT_EQ(r.code, 0) << r.err;
  const fs::path out = dir_ / "out";
  for (const char* f : {"twsb.report.json", "et.report.json", "rapb-la.report.json",
                        "reports.json", "summary.csv", "et.events.jsonl"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  const std::string csv = testing::ReadFile(out / "summary.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "strategy,total_tests,mean_feedback_hours,mean_ttc_hours,"
            "max_ttc_hours,infra_usage_hours,cost,cost_savings_pct");
  EXPECT_NE(r.out.find("annualized"), std::string::npos) << r.out;
  const SimulationReport base = ReportFromJson(
      nlohmann::json::parse(testing::ReadFile(out / "twsb.report.json")));
  ASSERT_TRUE(base.cost_savings_pct.has_value());
  EXPECT_NEAR(*base.cost_savings_pct, 0.0, 1e-9);
}

TEST_F(CliTest, NoBaselineOmitsSavingsColumn) {
  WriteConfig("");
  const CliRun r = Invoke({"simulate", "--config", Config()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = testing::ReadFile(dir_ / "out" / "summary.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "strategy,total_tests,mean_feedback_hours,mean_ttc_hours,"
            "max_ttc_hours,infra_usage_hours,cost");
  EXPECT_FALSE(fs::exists(dir_ / "out" / "et.events.jsonl"));
}

TEST_F(CliTest, SimulateIsByteIdenticalAcrossRuns) {
  ASSERT_EQ(Invoke({"simulate", "--config", Config(), "--export-events",
                 "--out", (dir_ / "a").string()}).code, 0);
  ASSERT_EQ(Invoke({"simulate", "--config", Config(), "--export-events",
                 "--out", (dir_ / "b").string()}).code, 0);
  for (const char* f : {"reports.json", "summary.csv", "rapb-la.events.jsonl"})
    EXPECT_EQ(testing::ReadFile(dir_ / "a" / f), testing::ReadFile(dir_ / "b" / f)) << f;
}

TEST_F(CliTest, CompareAnnotatesReportFiles) {
  ASSERT_EQ(Invoke({"simulate", "--config", Config()}).code, 0);
  const fs::path out = dir_ / "out";
  const CliRun r = Invoke({"compare", (out / "twsb.report.json").string(),
                        (out / "et.report.json").string(), "--baseline", "twsb",
                        "--out", (dir_ / "cmp").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("twsb: "), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("et: "), std::string::npos) << r.out;
  const nlohmann::json pareto =
      nlohmann::json::parse(testing::ReadFile(dir_ / "cmp" / "pareto.json"));
  EXPECT_EQ(pareto["baseline"], "twsb");
  ASSERT_TRUE(pareto["strategies"].is_array());
  EXPECT_EQ(pareto["strategies"].size(), 2u);
  EXPECT_EQ(Invoke({"compare", (out / "et.report.json").string()}).code, kExitUsage);
}

TEST_F(CliTest, TuneWritesFrontAndReplay) {
  const CliRun r = Invoke({"tune", "--config", Config(), "--threads", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const fs::path out = dir_ / "out";
  const nlohmann::json doc =
      nlohmann::json::parse(testing::ReadFile(out / "tune_fsb.json"));
  EXPECT_TRUE(doc.contains("front"));
  EXPECT_TRUE(doc.contains("test_report"));
  std::istringstream evals(testing::ReadFile(out / "tune_fsb.evaluations.jsonl"));
  std::string line;
  std::size_t n = 0;
  while (std::getline(evals, line)) ++n;
  EXPECT_EQ(n, 12u);
  EXPECT_TRUE(fs::exists(out / "tune_summary.csv"));
}

TEST_F(CliTest, UsageAndConfigErrorsExitOne) {
  EXPECT_EQ(Invoke({}).code, kExitUsage);
  EXPECT_EQ(Invoke({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"simulate"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"simulate", "--config", (dir_ / "nope.json").string()}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"simulate", "--config", Config(), "--stream",
                 (dir_ / "missing.jsonl").string()}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"generate", "--commits", "5"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"generate", "--out", dir_.string(), "--groups", "1,2"}).code,
            kExitUsage);
}

TEST_F(CliTest, UnknownKindListsValidKinds) {
  const CliRun r = Invoke({"tune", "--config", Config(), "--strategy", "bogus"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("rapb-la-s"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("twsb"), std::string::npos) << r.err;
}

TEST_F(CliTest, CatalogMismatchIsAConfigError) {
  std::ofstream(dir_ / "bad_catalog.json") << "[]";
  EXPECT_EQ(Invoke({"simulate", "--config", Config(), "--catalog",
                 (dir_ / "bad_catalog.json").string()}).code,
            kExitUsage);
}

TEST(ExitCodeFor, MapsErrorFamilies) {
  EXPECT_EQ(ExitCodeFor(InvariantError("x")), kExitInvariant);
  EXPECT_EQ(ExitCodeFor(ConfigError("x")), kExitUsage);
  EXPECT_EQ(ExitCodeFor(ParseError("x")), kExitUsage);
  EXPECT_EQ(ExitCodeFor(ValidationError("x")), kExitUsage);
  EXPECT_EQ(ExitCodeFor(std::filesystem::filesystem_error(
                "x", std::make_error_code(std::errc::permission_denied))),
            kExitUsage);
  EXPECT_EQ(ExitCodeFor(std::runtime_error("x")), kExitInvariant);
}

TEST_F(CliTest, BinaryReportsExitCodes) {
  const std::string cli = RISKBATCH_CLI_PATH;
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status(cli + " simulate --config " + Config()), 0);
  EXPECT_EQ(status(cli + " simulate"), 1);
  EXPECT_EQ(status(cli + " --help"), 0);
}

}  // namespace
}  // namespace riskbatch
