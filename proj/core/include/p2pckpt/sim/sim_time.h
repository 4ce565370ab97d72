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

#ifndef P2PCKPT_SIM_SIM_TIME_H_
#define P2PCKPT_SIM_SIM_TIME_H_

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>

namespace p2pckpt::sim {

// Virtual time in whole microseconds. Integer ticks keep the per-run
// wall-time accounting exact.
class SimTime {
 public:
  static constexpr std::int64_t kTicksPerSecond = 1'000'000;

  constexpr SimTime() = default;
  static constexpr SimTime from_ticks(std::int64_t t) { return SimTime(t); }
  // Nearest tick; +infinity and anything past the representable range map to never().
  static SimTime from_seconds(double s) {
    if (!(s < kMaxSeconds)) return never();
    return SimTime(static_cast<std::int64_t>(std::llround(s * kTicksPerSecond)));
  }
  static constexpr SimTime never() { return SimTime(std::numeric_limits<std::int64_t>::max()); }
  static constexpr SimTime zero() { return SimTime(0); }

  constexpr std::int64_t ticks() const { return ticks_; }
  constexpr double seconds() const { return static_cast<double>(ticks_) / kTicksPerSecond; }
  constexpr bool is_never() const { return *this == never(); }

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime& operator+=(SimTime o) {
    ticks_ += o.ticks_;
    return *this;
  }
  constexpr SimTime& operator-=(SimTime o) {
    ticks_ -= o.ticks_;
    return *this;
  }
  friend constexpr SimTime operator+(SimTime a, SimTime b) { return a += b; }
  friend constexpr SimTime operator-(SimTime a, SimTime b) { return a -= b; }

 private:
  static constexpr double kMaxSeconds = 9.0e12;
  constexpr explicit SimTime(std::int64_t t) : ticks_(t) {}
  std::int64_t ticks_ = 0;
};

// Saturating add so never() stays never().
constexpr SimTime saturating_add(SimTime a, SimTime b) {
  if (a.is_never() || b.is_never()) return SimTime::never();
  if (b.ticks() > 0 && a.ticks() > std::numeric_limits<std::int64_t>::max() - b.ticks()) {
    return SimTime::never();
  }
  return a + b;
}

}  // namespace p2pckpt::sim

#endif  // P2PCKPT_SIM_SIM_TIME_H_
