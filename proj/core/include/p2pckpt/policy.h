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

#ifndef P2PCKPT_POLICY_H_
#define P2PCKPT_POLICY_H_

// Checkpoint-utilization model for a coordinated job of k peers whose
// departures are exponential with per-peer rate mu. A checkpoint cycle is
// 1/lambda long; each checkpoint costs V and each failure costs the unsaved
// work plus a restore of T_d. All times in seconds, all rates in 1/seconds.

#include <string_view>

namespace p2pckpt::policy {

// Checkpoint rate bounds. Lower: at least one checkpoint per day. Upper: a
// cycle must fit at least twice its own checkpoint cost.
inline constexpr double kMinRate = 1.0 / 86400.0;
inline constexpr double kMaxRateWithoutOverhead = 1.0 / 10.0;

// Beyond this exponent e^(k mu / lambda) is treated as infinite.
inline constexpr double kExponentGuard = 700.0;

struct PolicyParams {
  double failure_rate = 0.0;         // mu, per peer
  int peers = 1;                     // k
  double checkpoint_overhead = 0.0;  // V
  double download_overhead = 0.0;    // T_d

  // k * mu; the job fails as soon as any participant departs.
  double job_failure_rate() const { return peers * failure_rate; }
  double job_mtbf() const { return 1.0 / job_failure_rate(); }

  // Throws std::invalid_argument unless mu > 0, k >= 1, V >= 0, T_d >= 0.
  void validate() const;
};

enum class Clamp { kNone, kMin, kMax };

struct PolicyOutput {
  double lambda_star = 0.0;
  double interval = 0.0;  // exactly 1 / lambda_star
  double utilization_at_star = 0.0;
  bool feasible = false;
  Clamp clamp = Clamp::kNone;
};

struct CycleBreakdown {
  double wasted_time = 0.0;       // T_wc'
  double fault_free_cycles = 0.0; // c-bar'
  double cycle_overhead = 0.0;    // C
  double utilization = 0.0;       // U
};

enum class Feasibility { kProgressing, kStalled };

std::string_view to_string(Feasibility f);
std::string_view to_string(Clamp c);

// k mu exp(-k mu t).
double failure_pdf(double t, const PolicyParams& p);

// 1 / (exp(k mu / lambda) - 1); 0 once the exponent passes kExponentGuard.
double mean_fault_free_cycles(const PolicyParams& p, double lambda);

// 1/(k mu) - c-bar'/lambda, in [0, 1/(k mu)].
double expected_wasted_time(const PolicyParams& p, double lambda);

// V + (T_wc' + T_d) / c-bar'; +infinity when c-bar' underflows to 0.
double cycle_overhead(const PolicyParams& p, double lambda);

// 1 - C lambda when C lambda < 1, else 0.
double utilization_for_overhead(double cycle_overhead, double lambda);
double utilization(const PolicyParams& p, double lambda);

CycleBreakdown cycle_breakdown(const PolicyParams& p, double lambda);

// Rate at which the upper clamp sits for the given checkpoint overhead.
double max_rate(double checkpoint_overhead);

// Closed-form maximiser of utilization via the principal Lambert W branch,
// clamped into [kMinRate, max_rate(V)].
PolicyOutput optimal_lambda(const PolicyParams& p);

Feasibility feasibility(const PolicyParams& p);

// Same formulas written for one peer; kept separate so the k = 1 reduction
// of the multi-peer model can be checked against them.
namespace single_peer {
double failure_pdf(double t, double mu);
double mean_fault_free_cycles(double mu, double lambda);
double expected_wasted_time(double mu, double lambda);
}  // namespace single_peer

}  // namespace p2pckpt::policy

#endif  // P2PCKPT_POLICY_H_
