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

// p2pckpt: batch experiments, policy evaluation and trace statistics.
//
//   p2pckpt run <config> --out <dir> [--seeds N] [--jobs N]
//   p2pckpt policy eval --mu <rate> --k <peers> --v <seconds> --td <seconds>
//   p2pckpt trace stats <file>
//
// Exit status: 0 success, 1 no runs produced, 2 usage or config error,
// 3 I/O error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <system_error>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "p2pckpt/experiment/batch.h"
#include "p2pckpt/experiment/config.h"
#include "p2pckpt/experiment/report.h"
#include "p2pckpt/policy.h"
#include "p2pckpt/sim/trace.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoRuns = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

constexpr const char* kOutDirEnv = "P2PCKPT_OUT_DIR";

namespace ex = p2pckpt::experiment;

int RunBatch(const std::string& config_path, std::string out_dir, int seeds, int jobs) {
  ex::ScenarioConfig config;
  try {
    config = ex::load_config(config_path);
    if (seeds > 0) ex::set_seed_count(config, seeds);
  } catch (const ex::ConfigError& e) {
    fmt::print(std::cerr, "config error: {}: {}\n", config_path, e.what());
    return kExitConfig;
  } catch (const std::system_error& e) {
    fmt::print(std::cerr, "i/o error: {}\n", e.what());
    return kExitIo;
  }

  if (out_dir.empty()) {
    const char* env = std::getenv(kOutDirEnv);
    out_dir = env && *env ? env : "results";
  }

  ex::BatchResult result;
  try {
    result = ex::run_batch(config, jobs);
  } catch (const p2pckpt::sim::TraceParseError& e) {
    fmt::print(std::cerr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::system_error& e) {
    fmt::print(std::cerr, "i/o error: {}\n", e.what());
    return kExitIo;
  }

  for (const auto& w : result.warnings) fmt::print(std::cerr, "warning: {}\n", w);
  ex::print_summary(std::cout, result.summary);

  try {
    const auto status = ex::emit_results(result.runs, result.summary, out_dir);
    fmt::print("\nwrote {}/runs.csv and {}/summary.csv\n", out_dir, out_dir);
    return status == ex::EmitStatus::kOk ? kExitOk : kExitNoRuns;
  } catch (const ex::IoError& e) {
    fmt::print(std::cerr, "i/o error: {}\n", e.what());
    return kExitIo;
  }
}

int EvalPolicy(double mu, int k, double v, double td) {
  namespace pol = p2pckpt::policy;
  const pol::PolicyParams params{mu, k, v, td};
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    fmt::print(std::cerr, "config error: {}\n", e.what());
    return kExitConfig;
  }
  const auto out = pol::optimal_lambda(params);
  fmt::print("lambda_star_per_s  {:.9g}\n", out.lambda_star);
  fmt::print("interval_s         {:.6f}\n", out.interval);
  fmt::print("utilization        {:.6f}\n", out.utilization_at_star);
  fmt::print("feasibility        {}\n", pol::to_string(out.feasible ? pol::Feasibility::kProgressing
                                                                   : pol::Feasibility::kStalled));
  fmt::print("clamp              {}\n", pol::to_string(out.clamp));
  fmt::print("job_mtbf_s         {:.6f}\n", params.job_mtbf());
  return kExitOk;
}

int TraceStats(const std::string& path) {
  try {
    const auto trace = p2pckpt::sim::ingest_trace(path);
    const auto st = p2pckpt::sim::summarize(trace);
    fmt::print("sessions           {}\n", st.sessions);
    fmt::print("mean_s             {:.3f}\n", st.mean);
    fmt::print("median_s           {:.3f}\n", st.median);
    fmt::print("stddev_s           {:.3f}\n", st.stddev);
    fmt::print("min_s              {:.3f}\n", st.min);
    fmt::print("max_s              {:.3f}\n", st.max);
    fmt::print("span_s             {:.3f}\n", st.span);
    fmt::print("mle_rate_per_s     {:.9g}\n", 1.0 / st.mean);
    return kExitOk;
  } catch (const p2pckpt::sim::TraceParseError& e) {
    fmt::print(std::cerr, "trace error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::system_error& e) {
    fmt::print(std::cerr, "i/o error: {}\n", e.what());
    return kExitIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive checkpointing over churning peer-to-peer networks"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run every policy x seed of a scenario config");
  std::string config_path;
  std::string out_dir;
  int seeds = 0;
  int jobs = 1;
  run->add_option("config", config_path, "Scenario config file")->required();
  run->add_option("--out", out_dir,
                  fmt::format("Output directory (default: ${} or ./results)", kOutDirEnv));
  run->add_option("--seeds", seeds, "Override the seed count (seeds 1..N)")->check(CLI::PositiveNumber);
  run->add_option("--jobs", jobs, "Parallel simulations")
      ->check(CLI::PositiveNumber)
      ->default_val(1);

  auto* policy = app.add_subcommand("policy", "Checkpoint policy model");
  policy->require_subcommand(1);
  auto* eval = policy->add_subcommand("eval", "Optimal checkpoint rate for given parameters");
  double mu = 0.0;
  int k = 1;
  double v = 0.0;
  double td = 0.0;
  eval->add_option("--mu", mu, "Per-peer failure rate (1/s)")->required();
  eval->add_option("--k", k, "Number of peers")->required();
  eval->add_option("--v", v, "Checkpoint overhead (s)")->required();
  eval->add_option("--td", td, "Image download overhead (s)")->required();

  auto* trace = app.add_subcommand("trace", "Session trace utilities");
  trace->require_subcommand(1);
  auto* stats = trace->add_subcommand("stats", "Session-time summary of a trace file");
  std::string trace_path;
  stats->add_option("file", trace_path, "Trace file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (*run) return RunBatch(config_path, out_dir, seeds, jobs);
  if (*eval) return EvalPolicy(mu, k, v, td);
  if (*stats) return TraceStats(trace_path);
  return kExitConfig;
}
