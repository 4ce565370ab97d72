// Copyright 2026 The p2pckpt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "p2pckpt/experiment/batch.h"
#include "p2pckpt/experiment/config.h"
#include "p2pckpt/experiment/report.h"
#include "p2pckpt/policy.h"

namespace p2pckpt::experiment {
namespace {

namespace fs = std::filesystem;

constexpr const char* kSmall = R"(# small but churning
[scenario]
name = small
[churn]
mtbf = 2h
population = 100
warmup = 2h
[job]
peers = 4
work = 1h
[policies]
adaptive = true
fixed = 300s
[run]
seeds = 3
)";

ScenarioConfig Parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("p2pckpt_test_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(RelativeRuntime, Percentages) {
  EXPECT_DOUBLE_EQ(relative_runtime(7200.0, 6000.0), 120.0);
  EXPECT_DOUBLE_EQ(relative_runtime(5000.0, 5000.0), 100.0);
  EXPECT_THROW(relative_runtime(0.0, 10.0), std::invalid_argument);
  EXPECT_THROW(relative_runtime(10.0, -1.0), std::invalid_argument);
}

TEST(ParseDuration, Suffixes) {
  EXPECT_DOUBLE_EQ(parse_duration("45"), 45.0);
  EXPECT_DOUBLE_EQ(parse_duration("20s"), 20.0);
  EXPECT_DOUBLE_EQ(parse_duration(" 30m "), 1800.0);
  EXPECT_DOUBLE_EQ(parse_duration("8h"), 28800.0);
  EXPECT_DOUBLE_EQ(parse_duration("1.5d"), 129600.0);
  EXPECT_THROW(parse_duration("soon"), ConfigError);
  EXPECT_THROW(parse_duration("10x"), ConfigError);
  EXPECT_THROW(parse_duration(""), ConfigError);
}

TEST(Config, ParsesAndExpandsSweep) {
  auto cfg = Parse(std::string(kSmall) + "[overheads]\ncheckpoint = 10s, 20s\n");
  EXPECT_EQ(cfg.name, "small");
  EXPECT_EQ(cfg.world.population, 100u);
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
  const auto scenarios = expand(cfg);
  ASSERT_EQ(scenarios.size(), 2u);
  EXPECT_EQ(scenarios[0].id, "small/V=10s");
  EXPECT_EQ(scenarios[1].id, "small/V=20s");
  EXPECT_EQ(scenarios[1].truth.checkpoint, 20.0);
  EXPECT_EQ(scenarios[0].policies.size(), 2u);
  EXPECT_DOUBLE_EQ(scenarios[0].max_wall_seconds, 50.0 * 3600.0);
}

TEST(Config, MtbfSweepIds) {
  auto cfg = Parse("[scenario]\nname = m\n[churn]\nmtbf = 4000s, 7200s, 14400s\n");
  const auto s = expand(cfg);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].id, "m/mtbf=4000s");
  EXPECT_EQ(s[2].id, "m/mtbf=14400s");
  EXPECT_DOUBLE_EQ(s[0].churn.base_rate, 1.0 / 4000.0);
  EXPECT_EQ(s[0].seeds.size(), 30u);
  EXPECT_EQ(s[0].job.peers, kDefaultPeers);
}

TEST(Config, Defaults) {
  const auto cfg = Parse("[scenario]\nname = d\n");
  const auto s = expand(cfg);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].id, "d");
  EXPECT_EQ(s[0].policies.size(), 6u);
  EXPECT_DOUBLE_EQ(s[0].job.work_seconds, 8.0 * 3600.0);
  EXPECT_EQ(s[0].truth.checkpoint, 20.0);
  EXPECT_EQ(s[0].truth.download, 50.0);
  EXPECT_EQ(s[0].estimator.formula, est::OverheadFormula::kProduct);
}

std::string ConfigErrorOf(const std::string& text) {
  try {
    Parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, RejectsBadInput) {
  EXPECT_NE(ConfigErrorOf("[churn]\nmtbf = 2h\nwobble = 3\n").find("churn.wobble"), std::string::npos);
  EXPECT_NE(ConfigErrorOf("stray = 1\n"), "");
  EXPECT_NE(ConfigErrorOf("[churn]\nmtbf = fast\n"), "");
  EXPECT_NE(ConfigErrorOf("[churn]\nmtbf = 0s\n"), "");
  EXPECT_NE(ConfigErrorOf("[policies]\nadaptive = maybe\n"), "");
  EXPECT_NE(ConfigErrorOf("[policies]\nadaptive = false\nfixed = none\n"), "");
  EXPECT_NE(ConfigErrorOf("[estimator]\nformula = median\n"), "");
  EXPECT_NE(ConfigErrorOf("[run]\nseeds = 0\n"), "");
  EXPECT_NE(ConfigErrorOf("[job]\npeers = 2000\n"), "");
  EXPECT_NE(ConfigErrorOf("[churn\nmtbf = 1h\n").find("line"), std::string::npos);
}

TEST(Config, MissingFileIsIoError) {
  EXPECT_THROW(load_config("/nonexistent/scenario.ini"), std::system_error);
}

TEST(Batch, CardinalityAndOrder) {
  const auto result = run_batch(Parse(kSmall));
  ASSERT_EQ(result.runs.size(), 6u);
  EXPECT_EQ(result.runs[0].policy, "adaptive");
  EXPECT_EQ(result.runs[3].policy, "fixed-300s");
  EXPECT_EQ(result.runs[4].seed, 2u);
  ASSERT_EQ(result.summary.size(), 2u);
  EXPECT_EQ(result.summary[1].n, 3u);
  ASSERT_TRUE(result.summary[1].relative_runtime_pct.has_value());
  for (const auto& r : result.runs) {
    EXPECT_GE(r.wall_time, 3600.0);
    EXPECT_EQ(r.accounting.total().seconds(), r.wall_time);
  }

  const fs::path dir = TempDir("cardinality");
  EXPECT_EQ(emit_results(result.runs, result.summary, dir), EmitStatus::kOk);
  std::istringstream runs(Slurp(dir / "runs.csv"));
  std::string line;
  int lines = 0;
  std::getline(runs, line);
  EXPECT_EQ(line, kRunsHeader);
  while (std::getline(runs, line)) ++lines;
  EXPECT_EQ(lines, 6);
  fs::remove_all(dir);
}

TEST(Batch, ByteIdenticalAcrossRerunsAndThreads) {
  const auto cfg = Parse(kSmall);
  const fs::path a = TempDir("det_a");
  const fs::path b = TempDir("det_b");
  const auto r1 = run_batch(cfg, 1);
  const auto r2 = run_batch(cfg, 3);
  emit_results(r1.runs, r1.summary, a);
  emit_results(r2.runs, r2.summary, b);
  EXPECT_EQ(Slurp(a / "runs.csv"), Slurp(b / "runs.csv"));
  EXPECT_EQ(Slurp(a / "summary.csv"), Slurp(b / "summary.csv"));
  EXPECT_EQ(Slurp(a / "runs.csv").find('\r'), std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Batch, SinglePolicySingleSeed) {
  std::string text = kSmall;
  text.replace(text.find("adaptive = true"), 15, "adaptive = false");
  text.replace(text.find("seeds = 3"), 9, "seeds = 1");
  const auto cfg = Parse(text);
  const auto result = run_batch(cfg);
  ASSERT_EQ(result.runs.size(), 1u);
  ASSERT_EQ(result.summary.size(), 1u);
  EXPECT_EQ(result.summary[0].mean_wall_time, result.runs[0].wall_time);
  EXPECT_EQ(result.summary[0].stddev, 0.0);
  EXPECT_EQ(result.summary[0].n, 1u);
  EXPECT_FALSE(result.summary[0].relative_runtime_pct.has_value());
}

TEST(Batch, NoChurnWallTimeIsWorkPlusCheckpoints) {
  auto cfg = Parse(R"([scenario]
name = calm
[churn]
mtbf = 1e15s
population = 50
warmup = 0s
[job]
peers = 4
work = 2h
[policies]
adaptive = true
fixed = 300s, 900s
[estimator]
prior_mtbf = 1e15s
[run]
seeds = 2
)");
  const auto scenarios = expand(cfg);
  const auto result = run_batch(scenarios);
  for (const auto& r : result.runs) {
    EXPECT_EQ(r.restarts, 0);
    EXPECT_DOUBLE_EQ(r.wall_time, 7200.0 + r.checkpoints * 20.0) << r.policy;
    if (r.policy == "adaptive") {
      ASSERT_TRUE(r.mu_hat && r.v_hat && r.td_hat);
      const auto star =
          policy::optimal_lambda(policy::PolicyParams{*r.mu_hat, 4, *r.v_hat, *r.td_hat});
      EXPECT_EQ(star.clamp, policy::Clamp::kMin);
      EXPECT_DOUBLE_EQ(r.mean_interval, star.interval);
    }
  }
}

TEST(Summary, PairsBySeedAndDropsCapped) {
  std::vector<RunRecord> runs;
  auto add = [&](const std::string& policy, std::uint64_t seed, double wall, bool capped = false) {
    RunRecord r;
    r.scenario = "s";
    r.policy = policy;
    r.seed = seed;
    r.wall_time = wall;
    r.capped = capped;
    runs.push_back(r);
  };
  add("adaptive", 1, 100.0);
  add("adaptive", 2, 200.0);
  add("adaptive", 3, 300.0, true);
  add("fixed-60s", 1, 150.0);
  add("fixed-60s", 2, 200.0);
  add("fixed-60s", 3, 900.0);
  add("fixed-900s", 1, 1000.0, true);
  add("fixed-900s", 2, 1000.0, true);
  add("fixed-900s", 3, 1000.0, true);
  std::vector<std::string> warnings;
  const auto rows = summarize(runs, &warnings);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].n, 2u);
  EXPECT_DOUBLE_EQ(*rows[0].relative_runtime_pct, 100.0);
  // Mean of per-seed ratios (150%, 100%), not ratio of means.
  EXPECT_DOUBLE_EQ(*rows[1].relative_runtime_pct, 125.0);
  EXPECT_EQ(rows[1].n, 2u);
  EXPECT_DOUBLE_EQ(rows[1].mean_wall_time, (150.0 + 200.0 + 900.0) / 3.0);
  EXPECT_FALSE(rows[2].relative_runtime_pct.has_value());
  EXPECT_EQ(rows[2].n, 0u);
  EXPECT_EQ(warnings.size(), 2u);
}

TEST(Report, EmptyRecordsWriteHeadersOnly) {
  const fs::path dir = TempDir("empty");
  EXPECT_EQ(emit_results({}, {}, dir), EmitStatus::kNoRuns);
  EXPECT_EQ(Slurp(dir / "runs.csv"), std::string(kRunsHeader) + "\n");
  EXPECT_EQ(Slurp(dir / "summary.csv"), std::string(kSummaryHeader) + "\n");
  fs::remove_all(dir);
}

TEST(Report, RowFormat) {
  RunRecord r;
  r.scenario = "x/mtbf=7200s";
  r.policy = "adaptive";
  r.seed = 4;
  r.wall_time = 30000.25;
  r.checkpoints = 12;
  r.restarts = 3;
  r.mean_interval = 173.5;
  r.mu_hat = 1.0 / 7200.0;
  r.v_hat = 19.5;
  r.td_hat = 50.0;
  std::ostringstream out;
  const RunRecord records[] = {r};
  write_runs_csv(out, records);
  EXPECT_EQ(out.str(), std::string(kRunsHeader) +
                           "\nx/mtbf=7200s,adaptive,4,30000.250000,12,3,173.500000,"
                           "1.388888889e-04,19.500000,50.000000,0\n");
  r.mu_hat.reset();
  r.v_hat.reset();
  r.td_hat.reset();
  r.capped = true;
  std::ostringstream out2;
  const RunRecord records2[] = {r};
  write_runs_csv(out2, records2);
  EXPECT_NE(out2.str().find(",173.500000,,,,1\n"), std::string::npos);
}

TEST(Report, UnwritableDirectory) {
  const fs::path file = TempDir("blocker");
  std::ofstream(file) << "x";
  try {
    emit_results({}, {}, file / "sub");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find(file.string()), std::string::npos);
  }
  fs::remove(file);
}

}  // namespace
}  // namespace p2pckpt::experiment
