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

#include "p2pckpt/policy.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "p2pckpt/lambert_w.h"

namespace p2pckpt::policy {

void PolicyParams::validate() const {
  if (!(failure_rate > 0.0) || !std::isfinite(failure_rate)) {
    throw std::invalid_argument("policy: failure rate must be positive and finite");
  }
  if (peers < 1) throw std::invalid_argument("policy: peer count must be at least 1");
  if (!(checkpoint_overhead >= 0.0) || !std::isfinite(checkpoint_overhead)) {
    throw std::invalid_argument("policy: checkpoint overhead must be non-negative");
  }
  if (!(download_overhead >= 0.0) || !std::isfinite(download_overhead)) {
    throw std::invalid_argument("policy: download overhead must be non-negative");
  }
}

std::string_view to_string(Feasibility f) {
  return f == Feasibility::kProgressing ? "progressing" : "stalled";
}

std::string_view to_string(Clamp c) {
  switch (c) {
    case Clamp::kNone:
      return "none";
    case Clamp::kMin:
      return "min";
    case Clamp::kMax:
      return "max";
  }
  return "none";
}

double failure_pdf(double t, const PolicyParams& p) {
  if (t < 0.0) return 0.0;
  const double rate = p.job_failure_rate();
  return rate * std::exp(-rate * t);
}

double mean_fault_free_cycles(const PolicyParams& p, double lambda) {
  const double exponent = p.job_failure_rate() / lambda;
  if (exponent > kExponentGuard) return 0.0;
  return 1.0 / std::expm1(exponent);
}

double expected_wasted_time(const PolicyParams& p, double lambda) {
  const double rate = p.job_failure_rate();
  const double cycles = mean_fault_free_cycles(p, lambda);
  // Clamp rounding at both ends of the analytic range.
  return std::clamp(1.0 / rate - cycles / lambda, 0.0, 1.0 / rate);
}

double cycle_overhead(const PolicyParams& p, double lambda) {
  const double cycles = mean_fault_free_cycles(p, lambda);
  if (cycles == 0.0) return std::numeric_limits<double>::infinity();
  return p.checkpoint_overhead +
         (expected_wasted_time(p, lambda) + p.download_overhead) / cycles;
}

double utilization_for_overhead(double overhead, double lambda) {
  const double load = overhead * lambda;
  return load < 1.0 ? 1.0 - load : 0.0;
}

double utilization(const PolicyParams& p, double lambda) {
  return utilization_for_overhead(cycle_overhead(p, lambda), lambda);
}

CycleBreakdown cycle_breakdown(const PolicyParams& p, double lambda) {
  CycleBreakdown b;
  b.wasted_time = expected_wasted_time(p, lambda);
  b.fault_free_cycles = mean_fault_free_cycles(p, lambda);
  b.cycle_overhead = cycle_overhead(p, lambda);
  b.utilization = utilization_for_overhead(b.cycle_overhead, lambda);
  return b;
}

double max_rate(double checkpoint_overhead) {
  return checkpoint_overhead > 0.0 ? 1.0 / (2.0 * checkpoint_overhead)
                                   : kMaxRateWithoutOverhead;
}

PolicyOutput optimal_lambda(const PolicyParams& p) {
  p.validate();
  const double upper = max_rate(p.checkpoint_overhead);
  const double km = p.job_failure_rate();

  double lambda = upper;
  Clamp clamp = Clamp::kMax;
  if (p.checkpoint_overhead > 0.0) {
    const double arg = (p.checkpoint_overhead * km - p.download_overhead * km - 1.0) /
                       (p.download_overhead * km + 1.0) / std::numbers::e;
    const double w = lambert_w0(arg);
    // w == -1 only when V * k * mu underflows against 1; treat as the V = 0 case.
    if (w > -1.0) {
      lambda = km / (w + 1.0);
      clamp = Clamp::kNone;
      if (lambda > upper) {
        lambda = upper;
        clamp = Clamp::kMax;
      } else if (lambda < kMinRate) {
        lambda = kMinRate;
        clamp = Clamp::kMin;
      }
    }
  }

  PolicyOutput out;
  out.lambda_star = lambda;
  out.interval = 1.0 / lambda;
  out.utilization_at_star = utilization(p, lambda);
  out.feasible = out.utilization_at_star > 0.0;
  out.clamp = clamp;
  return out;
}

Feasibility feasibility(const PolicyParams& p) {
  return optimal_lambda(p).feasible ? Feasibility::kProgressing : Feasibility::kStalled;
}

namespace single_peer {

double failure_pdf(double t, double mu) {
  if (t < 0.0) return 0.0;
  return mu * std::exp(-mu * t);
}

double mean_fault_free_cycles(double mu, double lambda) {
  const double exponent = mu / lambda;
  if (exponent > kExponentGuard) return 0.0;
  return 1.0 / std::expm1(exponent);
}

double expected_wasted_time(double mu, double lambda) {
  const double cycles = mean_fault_free_cycles(mu, lambda);
  return std::clamp(1.0 / mu - cycles / lambda, 0.0, 1.0 / mu);
}

}  // namespace single_peer

}  // namespace p2pckpt::policy
