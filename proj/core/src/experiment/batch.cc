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

#include "p2pckpt/experiment/batch.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

namespace p2pckpt::experiment {

double relative_runtime(double fixed_wall_time, double adaptive_wall_time) {
  if (!(fixed_wall_time > 0.0) || !(adaptive_wall_time > 0.0)) {
    throw std::invalid_argument("relative runtime needs positive wall times");
  }
  return 100.0 * fixed_wall_time / adaptive_wall_time;
}

RunRecord run_single(const Scenario& scenario, const sim::CheckpointPolicy& policy,
                     std::uint64_t seed) {
  sim::SimWorld world(scenario.world, scenario.churn, seed);
  sim::RunOptions options;
  options.max_wall_seconds = scenario.max_wall_seconds;
  const auto out = sim::run_job(world, scenario.job, policy, scenario.truth, scenario.estimator,
                                options, seed);
  RunRecord r;
  r.scenario = scenario.id;
  r.policy = sim::policy_id(policy);
  r.seed = seed;
  r.wall_time = out.wall_time;
  r.checkpoints = out.checkpoints;
  r.restarts = out.restarts;
  r.mean_interval = out.mean_interval;
  r.mu_hat = out.mu_hat;
  r.v_hat = out.v_hat;
  r.td_hat = out.td_hat;
  r.capped = out.capped;
  r.accounting = out.accounting;
  return r;
}

namespace {

struct Task {
  const Scenario* scenario;
  const sim::CheckpointPolicy* policy;
  std::uint64_t seed;
};

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double SampleStddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

std::vector<SummaryRow> summarize(std::span<const RunRecord> runs,
                                  std::vector<std::string>* warnings) {
  std::vector<SummaryRow> rows;
  std::size_t i = 0;
  while (i < runs.size()) {
    const std::string& scenario = runs[i].scenario;
    std::size_t end = i;
    while (end < runs.size() && runs[end].scenario == scenario) ++end;

    std::map<std::uint64_t, double> adaptive;
    bool has_adaptive = false;
    for (std::size_t j = i; j < end; ++j) {
      if (runs[j].policy != "adaptive") continue;
      has_adaptive = true;
      if (!runs[j].capped) adaptive[runs[j].seed] = runs[j].wall_time;
    }

    std::size_t j = i;
    while (j < end) {
      const std::string& policy = runs[j].policy;
      std::size_t stop = j;
      std::vector<double> walls;
      std::vector<double> ratios;
      std::size_t capped = 0;
      while (stop < end && runs[stop].policy == policy) {
        const auto& r = runs[stop];
        if (r.capped) {
          ++capped;
        } else {
          walls.push_back(r.wall_time);
          if (const auto it = adaptive.find(r.seed); it != adaptive.end()) {
            ratios.push_back(relative_runtime(r.wall_time, it->second));
          }
        }
        ++stop;
      }
      SummaryRow row;
      row.scenario = scenario;
      row.policy = policy;
      row.mean_wall_time = Mean(walls);
      row.stddev = SampleStddev(walls);
      if (has_adaptive && !ratios.empty()) row.relative_runtime_pct = Mean(ratios);
      row.n = has_adaptive && policy != "adaptive" ? ratios.size() : walls.size();
      if (capped > 0 && warnings) {
        warnings->push_back(fmt::format("{} / {}: {} run(s) hit the wall-time cap and were excluded",
                                        scenario, policy, capped));
      }
      rows.push_back(std::move(row));
      j = stop;
    }
    i = end;
  }
  return rows;
}

BatchResult run_batch(std::span<const Scenario> scenarios, int jobs) {
  std::vector<Task> tasks;
  for (const auto& s : scenarios) {
    for (const auto& p : s.policies) {
      auto seeds = s.seeds;
      std::sort(seeds.begin(), seeds.end());
      for (auto seed : seeds) tasks.push_back(Task{&s, &p, seed});
    }
  }

  BatchResult result;
  result.runs.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      try {
        result.runs[t] = run_single(*tasks[t].scenario, *tasks[t].policy, tasks[t].seed);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = tasks.size();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(tasks.size(), 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  result.summary = summarize(result.runs, &result.warnings);
  return result;
}

BatchResult run_batch(const ScenarioConfig& config, int jobs) {
  const auto scenarios = expand(config);
  return run_batch(scenarios, jobs);
}

}  // namespace p2pckpt::experiment
