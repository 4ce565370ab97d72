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

#include "p2pckpt/sim/churn.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace p2pckpt::sim {

double ChurnSchedule::rate_at(double t) const {
  if (!doubling_period || t <= 0.0) return base_rate;
  return base_rate * std::exp2(t / *doubling_period);
}

void ChurnSchedule::validate() const {
  if (trace) {
    if (trace->sessions.empty()) throw std::invalid_argument("churn trace is empty");
    return;
  }
  if (!(base_rate >= 0.0) || !std::isfinite(base_rate)) {
    throw std::invalid_argument("churn rate must be non-negative and finite");
  }
  if (doubling_period && !(*doubling_period > 0.0)) {
    throw std::invalid_argument("doubling period must be positive");
  }
}

double draw_lifetime(const ChurnSchedule& schedule, double now, Rng& rng) {
  if (!(schedule.base_rate > 0.0)) return std::numeric_limits<double>::infinity();
  if (!schedule.doubling_period) return rng.exponential(schedule.base_rate);

  const double period = *schedule.doubling_period;
  double t = now;
  if (t < 0.0) {
    // Flat hazard until submission; memorylessness lets us restart at 0.
    const double candidate = t + rng.exponential(schedule.base_rate);
    if (candidate < 0.0) return candidate - now;
    t = 0.0;
  }
  for (;;) {
    const double window_end = t + period;
    const double bound = schedule.rate_at(window_end);
    const double candidate = t + rng.exponential(bound);
    if (candidate > window_end) {
      t = window_end;
      continue;
    }
    if (rng.uniform() * bound < schedule.rate_at(candidate)) return candidate - now;
    t = candidate;
  }
}

LifetimeSampler::LifetimeSampler(ChurnSchedule schedule, Rng& rng) : schedule_(std::move(schedule)) {
  schedule_.validate();
  if (schedule_.trace) cursor_ = rng.below(schedule_.trace->sessions.size());
}

double LifetimeSampler::draw(double now, Rng& rng) {
  if (!schedule_.trace) return draw_lifetime(schedule_, now, rng);
  const auto& sessions = schedule_.trace->sessions;
  const double d = sessions[cursor_].duration;
  cursor_ = (cursor_ + 1) % sessions.size();
  return d;
}

}  // namespace p2pckpt::sim
