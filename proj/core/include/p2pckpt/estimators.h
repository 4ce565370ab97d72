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

#ifndef P2PCKPT_ESTIMATORS_H_
#define P2PCKPT_ESTIMATORS_H_

// Decentralised online estimation of the per-peer failure rate mu, the
// checkpoint overhead V and the image download time T_d, plus the averaging
// of estimates piggybacked between participants.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string_view>

namespace p2pckpt::est {

inline constexpr std::size_t kDefaultWindowCapacity = 50;
inline constexpr double kDefaultPriorRate = 1.0 / 7200.0;
inline constexpr double kDefaultCalibrationSeconds = 120.0;
inline constexpr int kDefaultFreshnessPeriods = 10;

// Raised by ml_failure_rate on an empty window; callers fall back to a prior.
class NoObservations : public std::runtime_error {
 public:
  NoObservations() : std::runtime_error("no peer failures observed yet") {}
};

class CalibrationIncomplete : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Most recent K observed peer session lengths, oldest evicted first.
class LifetimeWindow {
 public:
  explicit LifetimeWindow(std::size_t capacity = kDefaultWindowCapacity);

  // Throws std::invalid_argument for lifetime <= 0 or non-finite.
  void record(double lifetime);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return lifetimes_.size(); }
  bool empty() const { return lifetimes_.empty(); }
  bool full() const { return lifetimes_.size() == capacity_; }
  const std::deque<double>& lifetimes() const { return lifetimes_; }
  double total() const;

  void clear() { lifetimes_.clear(); }

 private:
  std::size_t capacity_;
  std::deque<double> lifetimes_;
};

// Value-returning form of LifetimeWindow::record.
LifetimeWindow record_peer_failure(LifetimeWindow w, double lifetime);

// Maximum-likelihood exponential rate: count / sum of lifetimes.
double ml_failure_rate(const LifetimeWindow& w);

struct RateEstimate {
  double rate = kDefaultPriorRate;
  bool from_prior = true;
};

// ml_failure_rate, or the prior when nothing has been observed.
RateEstimate failure_rate_or_prior(const LifetimeWindow& w, double prior = kDefaultPriorRate);

// Two equal-length calibration phases: phase 1 without checkpoints, phase 2
// checkpointing at a short interval and completing y checkpoints.
struct CalibrationRecord {
  double cpu_without = 0.0;       // P1
  double messages_without = 0.0;  // M1
  double cpu_with = 0.0;          // P2
  double messages_with = 0.0;     // M2
  double phase_seconds = 0.0;     // t
  int checkpoints = 0;            // y
};

enum class OverheadFormula {
  // (P1-P2)(M1-M2) t / (2 P1 M1 y)
  kProduct,
  // ((P1-P2)/P1 + (M1-M2)/M1) t / (2 y)
  kAveragedRatio,
};

std::string_view to_string(OverheadFormula f);
// Accepts "product" and "averaged"; throws std::invalid_argument otherwise.
OverheadFormula parse_overhead_formula(std::string_view s);

// Estimated V in seconds, clamped at 0. Throws CalibrationIncomplete when
// y < 1 or t <= 0, std::invalid_argument when P1 or M1 is not positive.
double estimate_checkpoint_overhead(const CalibrationRecord& c,
                                    OverheadFormula formula = OverheadFormula::kProduct);

struct PiggybackBundle {
  double mu_hat = 0.0;
  double v_hat = 0.0;
  double td_hat = 0.0;
  std::uint64_t origin = 0;
  double stamp = 0.0;  // virtual time of estimation, seconds

  void validate() const;
};

struct GlobalEstimate {
  double mu = 0.0;
  double v = 0.0;
  double td = 0.0;
  std::size_t contributors = 0;
};

// Arithmetic mean over {local} and the freshest received bundle of every
// other origin whose stamp is within `horizon` seconds of `now`.
GlobalEstimate aggregate_global(const PiggybackBundle& local,
                                std::span<const PiggybackBundle> received,
                                double now = 0.0,
                                double horizon = std::numeric_limits<double>::infinity());

struct DownloadEvent {
  enum class Kind { kInit, kBackgroundMeasured, kRestartMeasured };
  Kind kind = Kind::kInit;
  double seconds = 0.0;

  static DownloadEvent init() { return {Kind::kInit, 0.0}; }
  static DownloadEvent background(double d) { return {Kind::kBackgroundMeasured, d}; }
  static DownloadEvent restart(double d) { return {Kind::kRestartMeasured, d}; }
};

// Per-peer estimator state beyond the lifetime window, which lives with the
// peer in the overlay.
struct EstimatorState {
  double v_hat = 0.0;
  double td_hat = 0.0;
  bool calibrated = false;
  // Latest bundle per origin.
  std::map<std::uint64_t, PiggybackBundle> received;

  void receive(const PiggybackBundle& b);
};

// T_d := V on init, then the latest measured download (background or restart).
// Throws std::invalid_argument for a non-positive measurement.
double update_download_time(EstimatorState& state, const DownloadEvent& event);

}  // namespace p2pckpt::est

#endif  // P2PCKPT_ESTIMATORS_H_
