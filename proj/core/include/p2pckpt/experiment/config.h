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

#ifndef P2PCKPT_EXPERIMENT_CONFIG_H_
#define P2PCKPT_EXPERIMENT_CONFIG_H_

// Scenario configuration files: INI-style `[section]` headers and
// `key = value` lines. Durations take an optional s/m/h/d suffix (seconds by
// default); list-valued keys are comma separated and expand into a cartesian
// sweep of scenarios. See configs/README.md for every key.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "p2pckpt/sim/churn.h"
#include "p2pckpt/sim/job.h"
#include "p2pckpt/sim/world.h"

namespace p2pckpt::experiment {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "90", "90s", "2.5m", "8h", "1d" -> seconds. Throws ConfigError.
double parse_duration(std::string_view text);

inline constexpr double kDefaultWorkSeconds = 8.0 * 3600.0;
inline constexpr int kDefaultSeedCount = 30;
inline constexpr double kDefaultWallCapFactor = 50.0;
inline constexpr int kDefaultPeers = 16;

struct ScenarioConfig {
  std::string name = "scenario";

  // Churn: per-peer MTBF sweep (seconds), optional doubling, optional trace.
  std::vector<double> mtbfs{7200.0};
  std::optional<double> doubling_period;
  std::optional<std::filesystem::path> trace;
  sim::WorldConfig world;

  std::vector<int> peers{kDefaultPeers};
  double work_seconds = kDefaultWorkSeconds;

  std::vector<double> checkpoint_overheads{20.0};
  std::vector<double> download_overheads{50.0};

  bool adaptive = true;
  std::vector<double> fixed_intervals{60.0, 300.0, 900.0, 1800.0, 3600.0};
  bool no_checkpointing = false;

  sim::EstimatorSettings estimator;

  std::vector<std::uint64_t> seeds;  // filled with 1..30 when absent
  double wall_cap_factor = kDefaultWallCapFactor;

  // Throws ConfigError naming the offending setting.
  void validate() const;
};

// One point of the sweep, ready to simulate.
struct Scenario {
  std::string id;
  sim::ChurnSchedule churn;
  sim::WorldConfig world;
  sim::JobSpec job;
  sim::TrueOverheads truth;
  sim::EstimatorSettings estimator;
  std::vector<sim::CheckpointPolicy> policies;
  std::vector<std::uint64_t> seeds;
  double max_wall_seconds = 0.0;
};

ScenarioConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = ".");
// Throws ConfigError for syntax/semantic problems and std::system_error when
// the file cannot be read. Relative trace paths resolve against the file.
ScenarioConfig load_config(const std::filesystem::path& path);

// Cartesian product over mtbf x peers x checkpoint x download, in that
// nesting order. Loads the trace, if any, once.
std::vector<Scenario> expand(const ScenarioConfig& config);

// Replaces the seed list with 1..n.
void set_seed_count(ScenarioConfig& config, int n);

}  // namespace p2pckpt::experiment

#endif  // P2PCKPT_EXPERIMENT_CONFIG_H_
