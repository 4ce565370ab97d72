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

#include "p2pckpt/experiment/report.h"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <optional>
#include <system_error>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace p2pckpt::experiment {
namespace {

std::string Optional(const std::optional<double>& v, const char* spec) {
  return v ? fmt::format(fmt::runtime(spec), *v) : std::string();
}

void WriteFile(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, std::strerror(errno));
  out << body;
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

}  // namespace

IoError::IoError(const std::filesystem::path& path, const std::string& cause)
    : std::runtime_error(path.string() + ": " + cause), path_(path) {}

void write_runs_csv(std::ostream& out, std::span<const RunRecord> runs) {
  out << kRunsHeader << '\n';
  for (const auto& r : runs) {
    out << fmt::format("{},{},{},{:.6f},{},{},{:.6f},{},{},{},{}\n", r.scenario, r.policy, r.seed,
                       r.wall_time, r.checkpoints, r.restarts, r.mean_interval,
                       Optional(r.mu_hat, "{:.9e}"), Optional(r.v_hat, "{:.6f}"),
                       Optional(r.td_hat, "{:.6f}"), r.capped ? 1 : 0);
  }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << fmt::format("{},{},{:.6f},{:.6f},{},{}\n", r.scenario, r.policy, r.mean_wall_time,
                       r.stddev, Optional(r.relative_runtime_pct, "{:.4f}"), r.n);
  }
}

EmitStatus emit_results(std::span<const RunRecord> runs, std::span<const SummaryRow> summary,
                        const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir, ec.message());

  std::ostringstream runs_text;
  write_runs_csv(runs_text, runs);
  WriteFile(dir / "runs.csv", runs_text.str());

  std::ostringstream summary_text;
  write_summary_csv(summary_text, summary);
  WriteFile(dir / "summary.csv", summary_text.str());

  return runs.empty() ? EmitStatus::kNoRuns : EmitStatus::kOk;
}

void print_summary(std::ostream& out, std::span<const SummaryRow> rows) {
  std::string current;
  for (const auto& r : rows) {
    if (r.scenario != current) {
      current = r.scenario;
      fmt::print(out, "\n== {} ==\n{:<16} {:>14} {:>12} {:>10} {:>5}\n", current, "policy",
                 "mean wall (s)", "stddev (s)", "rel. (%)", "n");
    }
    fmt::print(out, "{:<16} {:>14.1f} {:>12.1f} {:>10} {:>5}\n", r.policy, r.mean_wall_time,
               r.stddev, r.relative_runtime_pct ? fmt::format("{:.1f}", *r.relative_runtime_pct) : "-",
               r.n);
  }
}

}  // namespace p2pckpt::experiment
