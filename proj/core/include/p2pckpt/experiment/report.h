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

#ifndef P2PCKPT_EXPERIMENT_REPORT_H_
#define P2PCKPT_EXPERIMENT_REPORT_H_

#include <filesystem>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>

#include "p2pckpt/experiment/batch.h"

namespace p2pckpt::experiment {

inline constexpr const char* kRunsHeader =
    "scenario,policy,seed,wall_time_s,checkpoints,restarts,mean_interval_s,mu_hat,v_hat,td_hat,capped";
inline constexpr const char* kSummaryHeader =
    "scenario,policy,mean_wall_time_s,stddev_s,relative_runtime_pct,n";

class IoError : public std::runtime_error {
 public:
  IoError(const std::filesystem::path& path, const std::string& cause);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

enum class EmitStatus { kOk, kNoRuns };

void write_runs_csv(std::ostream& out, std::span<const RunRecord> runs);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

// Writes runs.csv and summary.csv into `dir`, creating it if needed. Empty
// input still writes both headers and reports kNoRuns. Throws IoError.
EmitStatus emit_results(std::span<const RunRecord> runs, std::span<const SummaryRow> summary,
                        const std::filesystem::path& dir);

// Aligned per-scenario tables for a terminal.
void print_summary(std::ostream& out, std::span<const SummaryRow> rows);

}  // namespace p2pckpt::experiment

#endif  // P2PCKPT_EXPERIMENT_REPORT_H_
