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

#ifndef P2PCKPT_SIM_JOB_H_
#define P2PCKPT_SIM_JOB_H_

// A coordinated checkpointed job of k participants running inside a
// SimWorld. Work accrues at rate 1 while running; a checkpoint freezes
// progress for V seconds and commits atomically at its end; any participant
// departure rolls the job back to the last committed progress, swaps in a
// random live non-participant and restores for T_d seconds.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "p2pckpt/estimators.h"
#include "p2pckpt/sim/sim_time.h"
#include "p2pckpt/sim/world.h"

namespace p2pckpt::sim {

struct JobSpec {
  int peers = 16;
  double work_seconds = 8.0 * 3600.0;  // fault-free runtime

  void validate() const;
};

struct TrueOverheads {
  double checkpoint = 20.0;  // V
  double download = 50.0;    // T_d

  void validate() const;
};

struct FixedInterval {
  double seconds = 300.0;
};
struct AdaptiveInterval {};
struct NoCheckpointing {};

using CheckpointPolicy = std::variant<FixedInterval, AdaptiveInterval, NoCheckpointing>;

// "adaptive", "none", or "fixed-<seconds>s".
std::string policy_id(const CheckpointPolicy& policy);

struct EstimatorSettings {
  est::OverheadFormula formula = est::OverheadFormula::kProduct;
  double calibration_seconds = est::kDefaultCalibrationSeconds;  // t, per phase
  double calibration_interval = 40.0;  // work between checkpoints in phase 2
  double prior_rate = est::kDefaultPriorRate;
  int freshness_periods = est::kDefaultFreshnessPeriods;
  // Half-width of the uniform relative noise on CPU and message readings.
  double measurement_noise = 0.01;
  double cpu_baseline = 0.95;
  double message_rate = 10.0;  // messages per second of useful work

  void validate() const;
};

struct RunOptions {
  double max_wall_seconds = std::numeric_limits<double>::infinity();
  // Seconds after submission at which a random participant is killed.
  std::vector<double> injected_failures;
  bool keep_commit_log = false;
};

struct WallAccounting {
  SimTime useful;
  SimTime checkpointing;
  SimTime wasted;
  SimTime restoring;

  SimTime total() const { return useful + checkpointing + wasted + restoring; }
};

struct JobOutcome {
  SimTime wall;
  double wall_time = 0.0;
  long checkpoints = 0;
  long restarts = 0;
  double mean_interval = 0.0;
  std::optional<double> mu_hat;
  std::optional<double> v_hat;
  std::optional<double> td_hat;
  bool capped = false;
  WallAccounting accounting;
  // Committed progress after each checkpoint, when RunOptions asks for it.
  std::vector<SimTime> commit_log;
  int calibrations = 0;
};

// Advances `world` to time 0 if needed, submits the job there and simulates
// until the job finishes or the wall-time cap is reached. `seed` feeds the
// job and measurement random streams only.
JobOutcome run_job(SimWorld& world, const JobSpec& spec, const CheckpointPolicy& policy,
                   const TrueOverheads& truth, const EstimatorSettings& settings,
                   const RunOptions& options, std::uint64_t seed);

}  // namespace p2pckpt::sim

#endif  // P2PCKPT_SIM_JOB_H_
