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

#include "p2pckpt/estimators.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

namespace p2pckpt::est {

LifetimeWindow::LifetimeWindow(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("lifetime window capacity must be positive");
}

void LifetimeWindow::record(double lifetime) {
  if (!(lifetime > 0.0) || !std::isfinite(lifetime)) {
    throw std::invalid_argument("observed lifetime must be positive, got " +
                                std::to_string(lifetime));
  }
  lifetimes_.push_back(lifetime);
  if (lifetimes_.size() > capacity_) lifetimes_.pop_front();
}

double LifetimeWindow::total() const {
  return std::accumulate(lifetimes_.begin(), lifetimes_.end(), 0.0);
}

LifetimeWindow record_peer_failure(LifetimeWindow w, double lifetime) {
  w.record(lifetime);
  return w;
}

double ml_failure_rate(const LifetimeWindow& w) {
  if (w.empty()) throw NoObservations();
  return static_cast<double>(w.size()) / w.total();
}

RateEstimate failure_rate_or_prior(const LifetimeWindow& w, double prior) {
  if (w.empty()) return {prior, true};
  return {ml_failure_rate(w), false};
}

std::string_view to_string(OverheadFormula f) {
  return f == OverheadFormula::kProduct ? "product" : "averaged";
}

OverheadFormula parse_overhead_formula(std::string_view s) {
  if (s == "product") return OverheadFormula::kProduct;
  if (s == "averaged") return OverheadFormula::kAveragedRatio;
  throw std::invalid_argument("unknown overhead formula '" + std::string(s) +
                              "' (expected product or averaged)");
}

double estimate_checkpoint_overhead(const CalibrationRecord& c, OverheadFormula formula) {
  if (c.checkpoints < 1) throw CalibrationIncomplete("calibration completed no checkpoints");
  if (!(c.phase_seconds > 0.0)) throw CalibrationIncomplete("calibration phase has no length");
  if (!(c.cpu_without > 0.0) || !(c.messages_without > 0.0)) {
    throw std::invalid_argument("calibration baseline CPU usage and message count must be positive");
  }
  const double cpu_drop = c.cpu_without - c.cpu_with;
  const double msg_drop = c.messages_without - c.messages_with;
  const double y = static_cast<double>(c.checkpoints);
  double v = 0.0;
  switch (formula) {
    case OverheadFormula::kProduct:
      v = cpu_drop * msg_drop * c.phase_seconds /
          (2.0 * c.cpu_without * c.messages_without * y);
      break;
    case OverheadFormula::kAveragedRatio:
      v = (cpu_drop / c.cpu_without + msg_drop / c.messages_without) * c.phase_seconds /
          (2.0 * y);
      break;
  }
  // Measurement noise can make phase 2 look faster than phase 1.
  return std::max(v, 0.0);
}

void PiggybackBundle::validate() const {
  if (!(mu_hat > 0.0)) throw std::invalid_argument("piggyback mu estimate must be positive");
  if (!(v_hat >= 0.0) || !(td_hat >= 0.0)) {
    throw std::invalid_argument("piggyback overhead estimates must be non-negative");
  }
}

namespace {

bool Fresher(const PiggybackBundle& a, const PiggybackBundle& b) {
  return std::tie(a.stamp, a.mu_hat, a.v_hat, a.td_hat) >
         std::tie(b.stamp, b.mu_hat, b.v_hat, b.td_hat);
}

}  // namespace

GlobalEstimate aggregate_global(const PiggybackBundle& local,
                                std::span<const PiggybackBundle> received, double now,
                                double horizon) {
  local.validate();
  std::map<std::uint64_t, const PiggybackBundle*> latest;
  for (const auto& b : received) {
    b.validate();
    if (b.origin == local.origin) continue;
    if (now - b.stamp > horizon) continue;
    auto [it, inserted] = latest.emplace(b.origin, &b);
    if (!inserted && Fresher(b, *it->second)) it->second = &b;
  }
  latest[local.origin] = &local;

  GlobalEstimate g;
  for (const auto& [origin, b] : latest) {
    g.mu += b->mu_hat;
    g.v += b->v_hat;
    g.td += b->td_hat;
  }
  g.contributors = latest.size();
  const double n = static_cast<double>(g.contributors);
  g.mu /= n;
  g.v /= n;
  g.td /= n;
  return g;
}

void EstimatorState::receive(const PiggybackBundle& b) {
  auto [it, inserted] = received.emplace(b.origin, b);
  if (!inserted && Fresher(b, it->second)) it->second = b;
}

double update_download_time(EstimatorState& state, const DownloadEvent& event) {
  switch (event.kind) {
    case DownloadEvent::Kind::kInit:
      state.td_hat = state.v_hat;
      break;
    case DownloadEvent::Kind::kBackgroundMeasured:
    case DownloadEvent::Kind::kRestartMeasured:
      if (!(event.seconds > 0.0)) {
        throw std::invalid_argument("measured download time must be positive");
      }
      state.td_hat = event.seconds;
      break;
  }
  return state.td_hat;
}

}  // namespace p2pckpt::est
