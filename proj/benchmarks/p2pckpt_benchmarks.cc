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


#include <benchmark/benchmark.h>

#include "p2pckpt/estimators.h"
#include "p2pckpt/lambert_w.h"
#include "p2pckpt/policy.h"
#include "p2pckpt/sim/job.h"
#include "p2pckpt/sim/world.h"

namespace {

namespace pol = p2pckpt::policy;
namespace sim = p2pckpt::sim;

void BM_LambertW0(benchmark::State& state) {
  double x = -0.36;
  for (auto _ : state) {
    benchmark::DoNotOptimize(p2pckpt::lambert_w0(x));
    x = x < 50.0 ? x + 0.013 : -0.36;
  }
}
BENCHMARK(BM_LambertW0);

void BM_OptimalLambda(benchmark::State& state) {
  pol::PolicyParams p{1.0 / 7200.0, 8, 20.0, 50.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(pol::optimal_lambda(p));
    p.peers = p.peers % 48 + 1;
  }
}
BENCHMARK(BM_OptimalLambda);

void BM_MlFailureRate(benchmark::State& state) {
  p2pckpt::est::LifetimeWindow w(static_cast<std::size_t>(state.range(0)));
  for (int i = 0; i < state.range(0); ++i) w.record(3600.0 + 17.0 * i);
  for (auto _ : state) benchmark::DoNotOptimize(p2pckpt::est::ml_failure_rate(w));
}
BENCHMARK(BM_MlFailureRate)->Arg(50)->Arg(10000);

void BM_WorldChurnHour(benchmark::State& state) {
  sim::WorldConfig c;
  c.population = static_cast<std::size_t>(state.range(0));
  c.warmup = 0.0;
  for (auto _ : state) {
    sim::SimWorld w(c, sim::ChurnSchedule::constant(1.0 / 3600.0), 7);
    while (w.step(sim::SimTime::from_seconds(3600.0))) {
    }
    benchmark::DoNotOptimize(w.departures());
  }
}
BENCHMARK(BM_WorldChurnHour)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_AdaptiveJob(benchmark::State& state) {
  sim::WorldConfig c;
  c.population = 1000;
  c.warmup = 6 * 3600.0;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    sim::SimWorld w(c, sim::ChurnSchedule::constant(1.0 / 7200.0), seed);
    const auto out = sim::run_job(w, sim::JobSpec{16, 8 * 3600.0}, sim::CheckpointPolicy{sim::AdaptiveInterval{}},
                                  {}, {}, {}, seed);
    benchmark::DoNotOptimize(out.accounting);
    ++seed;
  }
}
BENCHMARK(BM_AdaptiveJob)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
