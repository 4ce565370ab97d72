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


#include "p2pckpt/sim/job.h"

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "p2pckpt/policy.h"
#include "p2pckpt/sim/world.h"

namespace p2pckpt::sim {
namespace {

SimTime S(double seconds) { return SimTime::from_seconds(seconds); }

WorldConfig Quiet() {
  WorldConfig c;
  c.population = 60;
  c.warmup = 0.0;
  return c;
}

JobOutcome RunQuiet(const CheckpointPolicy& policy, double work, RunOptions options = {},
                    TrueOverheads truth = {}, EstimatorSettings settings = {}) {
  SimWorld w(Quiet(), ChurnSchedule::constant(0.0), 1);
  return run_job(w, JobSpec{8, work}, policy, truth, settings, options, 1);
}

TEST(RunJob, NoChurnNoCheckpointsTakesExactlyTheWork) {
  const auto out = RunQuiet(NoCheckpointing{}, 3600.0);
  EXPECT_EQ(out.wall, S(3600.0));
  EXPECT_EQ(out.checkpoints, 0);
  EXPECT_EQ(out.restarts, 0);
  EXPECT_FALSE(out.capped);
}

TEST(RunJob, EachCheckpointAddsItsCost) {
  const auto out = RunQuiet(FixedInterval{300.0}, 3600.0);
  // No checkpoint after the final segment.
  EXPECT_EQ(out.checkpoints, 11);
  EXPECT_EQ(out.wall, S(3600.0 + out.checkpoints * 20.0));
  EXPECT_DOUBLE_EQ(out.mean_interval, 300.0);
}

TEST(RunJob, ScriptedFailureBetweenCheckpoints) {
  RunOptions opt;
  opt.injected_failures = {1000.0};
  const auto out = RunQuiet(FixedInterval{300.0}, 3600.0, opt);
  // Commits at 320, 640, 960; failure at 1000 loses 40 s, then 50 s restore.
  EXPECT_EQ(out.restarts, 1);
  EXPECT_EQ(out.checkpoints, 11);
  EXPECT_EQ(out.wall, S(3600.0 + 11 * 20.0 + (1000.0 - 960.0) + 50.0));
  EXPECT_EQ(out.accounting.wasted, S(40.0));
  EXPECT_EQ(out.accounting.restoring, S(50.0));
}

TEST(RunJob, FailureDuringCheckpointLosesIt) {
  RunOptions opt;
  opt.injected_failures = {310.0};
  const auto out = RunQuiet(FixedInterval{300.0}, 3600.0, opt);
  EXPECT_EQ(out.checkpoints, 11);
  EXPECT_EQ(out.accounting.wasted, S(300.0));
  EXPECT_EQ(out.accounting.checkpointing, S(11 * 20.0 + 10.0));
  EXPECT_EQ(out.wall, S(310.0 + 50.0 + 3600.0 + 11 * 20.0));
}

TEST(RunJob, FailureDuringRestoreRestartsDownload) {
  RunOptions opt;
  opt.injected_failures = {1000.0, 1020.0};
  const auto out = RunQuiet(FixedInterval{300.0}, 3600.0, opt);
  EXPECT_EQ(out.restarts, 2);
  EXPECT_EQ(out.accounting.restoring, S(20.0 + 50.0));
  EXPECT_EQ(out.wall, S(3600.0 + 11 * 20.0 + 40.0 + 20.0 + 50.0));
}

TEST(RunJob, WallTimeCap) {
  RunOptions opt;
  opt.max_wall_seconds = 1000.0;
  const auto out = RunQuiet(NoCheckpointing{}, 3600.0, opt);
  EXPECT_TRUE(out.capped);
  EXPECT_EQ(out.wall, S(1000.0));
}

TEST(RunJob, AdaptiveCalibratesWithoutChurn) {
  EstimatorSettings s;
  s.formula = est::OverheadFormula::kAveragedRatio;
  const auto out = RunQuiet(AdaptiveInterval{}, 4.0 * 3600.0, {}, {}, s);
  ASSERT_TRUE(out.v_hat && out.td_hat && out.mu_hat);
  EXPECT_NEAR(*out.v_hat, 20.0, 0.05 * 20.0);
  EXPECT_EQ(*out.td_hat, 50.0);
  // Without observed failures the prior stands in for mu.
  EXPECT_DOUBLE_EQ(*out.mu_hat, est::kDefaultPriorRate);
  EXPECT_EQ(out.calibrations, 1);
  EXPECT_EQ(out.wall, out.accounting.total());
}

class ChurnRuns : public ::testing::TestWithParam<std::uint64_t> {};

JobOutcome RunChurn(const CheckpointPolicy& policy, std::uint64_t seed, bool log = false) {
  WorldConfig c;
  c.population = 300;
  c.warmup = 6.0 * 3600.0;
  SimWorld w(c, ChurnSchedule::constant(1.0 / 3600.0), seed);
  RunOptions opt;
  opt.keep_commit_log = log;
  return run_job(w, JobSpec{8, 4.0 * 3600.0}, policy, TrueOverheads{}, EstimatorSettings{}, opt,
                 seed);
}

TEST_P(ChurnRuns, WallTimeIsConserved) {
  for (const CheckpointPolicy& p :
       {CheckpointPolicy{AdaptiveInterval{}}, CheckpointPolicy{FixedInterval{120.0}},
        CheckpointPolicy{FixedInterval{600.0}}}) {
    const auto out = RunChurn(p, GetParam());
    EXPECT_FALSE(out.capped);
    EXPECT_GT(out.restarts, 0);
    EXPECT_EQ(out.wall, out.accounting.total()) << policy_id(p);
    EXPECT_EQ(out.accounting.useful, S(4.0 * 3600.0));
  }
}

TEST_P(ChurnRuns, CommittedProgressNeverDecreases) {
  for (const CheckpointPolicy& p :
       {CheckpointPolicy{AdaptiveInterval{}}, CheckpointPolicy{FixedInterval{300.0}}}) {
    const auto out = RunChurn(p, GetParam(), true);
    ASSERT_EQ(out.commit_log.size(), static_cast<std::size_t>(out.checkpoints));
    EXPECT_TRUE(std::is_sorted(out.commit_log.begin(), out.commit_log.end()));
    if (!out.commit_log.empty()) {
      EXPECT_LE(out.commit_log.back(), S(4.0 * 3600.0));
    }
  }
}

TEST_P(ChurnRuns, BitIdenticalForSeed) {
  const auto a = RunChurn(AdaptiveInterval{}, GetParam());
  const auto b = RunChurn(AdaptiveInterval{}, GetParam());
  EXPECT_EQ(a.wall, b.wall);
  EXPECT_EQ(a.checkpoints, b.checkpoints);
  EXPECT_EQ(a.restarts, b.restarts);
  EXPECT_EQ(a.mean_interval, b.mean_interval);
  EXPECT_EQ(a.mu_hat, b.mu_hat);
  EXPECT_EQ(a.v_hat, b.v_hat);
  EXPECT_EQ(a.accounting.wasted, b.accounting.wasted);
}

INSTANTIATE_TEST_SUITE_P(Seeds, ChurnRuns, ::testing::Values(1, 2, 3));

TEST(RunJob, MeanWasteMatchesAnalyticExpectation) {
  const double mu = 1.0 / 7200.0;
  const int k = 8;
  const double interval = 300.0;
  WorldConfig c;
  c.population = 150;
  c.warmup = 0.0;
  SimWorld w(c, ChurnSchedule::constant(mu), 77);
  const auto out = run_job(w, JobSpec{k, 8.0e6}, FixedInterval{interval}, TrueOverheads{0.0, 0.0},
                           EstimatorSettings{}, RunOptions{}, 77);
  ASSERT_GE(out.restarts, 10000);
  const double mean_waste = out.accounting.wasted.seconds() / static_cast<double>(out.restarts);
  const double expected =
      policy::expected_wasted_time(policy::PolicyParams{mu, k, 0.0, 0.0}, 1.0 / interval);
  EXPECT_NEAR(mean_waste, expected, 0.02 * expected);
}

TEST(RunJob, RejectsBadInputs) {
  SimWorld w(Quiet(), ChurnSchedule::constant(0.0), 1);
  EXPECT_THROW(run_job(w, JobSpec{8, 100.0}, FixedInterval{0.0}, {}, {}, {}, 1),
               std::invalid_argument);
  EXPECT_THROW(run_job(w, JobSpec{0, 100.0}, FixedInterval{10.0}, {}, {}, {}, 1),
               std::invalid_argument);
  EXPECT_THROW(run_job(w, JobSpec{100, 100.0}, FixedInterval{10.0}, {}, {}, {}, 1),
               std::runtime_error);
}

TEST(PolicyId, Names) {
  EXPECT_EQ(policy_id(AdaptiveInterval{}), "adaptive");
  EXPECT_EQ(policy_id(NoCheckpointing{}), "none");
  EXPECT_EQ(policy_id(FixedInterval{300.0}), "fixed-300s");
  EXPECT_EQ(policy_id(FixedInterval{0.5}), "fixed-0.5s");
}

}  // namespace
}  // namespace p2pckpt::sim
