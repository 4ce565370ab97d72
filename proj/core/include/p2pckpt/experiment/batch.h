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

#ifndef P2PCKPT_EXPERIMENT_BATCH_H_
#define P2PCKPT_EXPERIMENT_BATCH_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "p2pckpt/experiment/config.h"
#include "p2pckpt/sim/job.h"

namespace p2pckpt::experiment {

struct RunRecord {
  std::string scenario;
  std::string policy;
  std::uint64_t seed = 0;
  double wall_time = 0.0;
  long checkpoints = 0;
  long restarts = 0;
  double mean_interval = 0.0;
  std::optional<double> mu_hat;
  std::optional<double> v_hat;
  std::optional<double> td_hat;
  bool capped = false;
  sim::WallAccounting accounting;
};

struct SummaryRow {
  std::string scenario;
  std::string policy;
  double mean_wall_time = 0.0;
  double stddev = 0.0;
  // Paired by seed against the adaptive run, then averaged. Empty when the
  // scenario has no adaptive policy or no uncapped pair.
  std::optional<double> relative_runtime_pct;
  std::size_t n = 0;
};

struct BatchResult {
  std::vector<RunRecord> runs;  // ordered by (scenario, policy, seed)
  std::vector<SummaryRow> summary;
  std::vector<std::string> warnings;
};

// 100 * fixed / adaptive. Above 100 means the adaptive run finished sooner.
double relative_runtime(double fixed_wall_time, double adaptive_wall_time);

// A fresh world per run; identical inputs give a bit-identical record.
RunRecord run_single(const Scenario& scenario, const sim::CheckpointPolicy& policy,
                     std::uint64_t seed);

// Every (scenario, policy, seed) combination, on up to `jobs` threads.
BatchResult run_batch(std::span<const Scenario> scenarios, int jobs = 1);
BatchResult run_batch(const ScenarioConfig& config, int jobs = 1);

// Summary rows for records already ordered by (scenario, policy, seed).
std::vector<SummaryRow> summarize(std::span<const RunRecord> runs,
                                  std::vector<std::string>* warnings = nullptr);

}  // namespace p2pckpt::experiment

#endif  // P2PCKPT_EXPERIMENT_BATCH_H_
