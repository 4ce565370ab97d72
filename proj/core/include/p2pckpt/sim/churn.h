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

#ifndef P2PCKPT_SIM_CHURN_H_
#define P2PCKPT_SIM_CHURN_H_

#include <cstddef>
#include <memory>
#include <optional>

#include "p2pckpt/sim/rng.h"
#include "p2pckpt/sim/trace.h"

namespace p2pckpt::sim {

// Per-peer departure hazard. Time is measured in seconds from job
// submission; the rate is flat at base_rate before time 0 and, when a
// doubling period D is set, grows as base_rate * 2^(t / D) afterwards.
struct ChurnSchedule {
  double base_rate = 0.0;
  std::optional<double> doubling_period;
  // When set, lifetimes are replayed from the trace instead of drawn.
  std::shared_ptr<const SessionTrace> trace;

  double rate_at(double t) const;

  static ChurnSchedule constant(double rate) { return {rate, std::nullopt, nullptr}; }
  static ChurnSchedule doubling(double rate, double period) { return {rate, period, nullptr}; }
  static ChurnSchedule replay(std::shared_ptr<const SessionTrace> t) { return {0.0, std::nullopt, std::move(t)}; }

  // Throws std::invalid_argument on a negative rate or non-positive period.
  void validate() const;
};

// Exponential lifetime for a session starting at `now` under the schedule's
// hazard. Growing hazards are sampled by thinning over windows one doubling
// period long. Returns +infinity when the rate is zero. Ignores `trace`.
double draw_lifetime(const ChurnSchedule& schedule, double now, Rng& rng);

// Lifetime source for a world: parametric draws, or sequential replay of the
// trace's durations from a seeded starting row.
class LifetimeSampler {
 public:
  LifetimeSampler(ChurnSchedule schedule, Rng& rng);

  double draw(double now, Rng& rng);
  const ChurnSchedule& schedule() const { return schedule_; }

 private:
  ChurnSchedule schedule_;
  std::size_t cursor_ = 0;
};

}  // namespace p2pckpt::sim

#endif  // P2PCKPT_SIM_CHURN_H_
