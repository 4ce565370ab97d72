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

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "oracles.h"

namespace p2pckpt::policy {
namespace {

constexpr double kMu = 1.0 / 7200.0;

PolicyParams Reference(int k = 8) { return PolicyParams{kMu, k, 20.0, 50.0}; }

TEST(FailurePdf, ExponentialInJobRate) {
  const PolicyParams p{1.0 / 2000.0, 8, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(failure_pdf(0.0, p), 0.004);
  EXPECT_NEAR(failure_pdf(250.0, p), 0.004 * std::exp(-1.0), 1e-15);
  EXPECT_EQ(failure_pdf(-1.0, p), 0.0);
}

TEST(FailurePdf, IntegratesToOne) {
  const PolicyParams p = Reference();
  const double a = p.job_failure_rate();
  const double hi = 40.0 / a;
  const int n = 200000;
  const double h = hi / n;
  double s = failure_pdf(0.0, p) + failure_pdf(hi, p);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * failure_pdf(i * h, p);
  EXPECT_NEAR(s * h / 3.0, 1.0, 1e-9);
}

TEST(FaultFreeCycles, OneWhenExponentIsLogTwo) {
  const PolicyParams p = Reference();
  const double lambda = p.job_failure_rate() / std::numbers::ln2;
  EXPECT_NEAR(mean_fault_free_cycles(p, lambda), 1.0, 1e-12);
}

TEST(FaultFreeCycles, MatchesSeriesOracle) {
  const PolicyParams p = Reference();
  EXPECT_NEAR(mean_fault_free_cycles(p, 1.0 / 300.0), 2.527726473157129, 1e-12);
  for (double interval : {10.0, 120.0, 900.0, 3600.0}) {
    const double lambda = 1.0 / interval;
    EXPECT_NEAR(mean_fault_free_cycles(p, lambda),
                oracle::series_fault_free_cycles(p.job_failure_rate(), lambda),
                1e-9 * oracle::series_fault_free_cycles(p.job_failure_rate(), lambda));
  }
}

TEST(FaultFreeCycles, GuardsHugeExponent) {
  const PolicyParams p{1.0, 32, 20.0, 50.0};
  EXPECT_EQ(mean_fault_free_cycles(p, 1e-3), 0.0);
  EXPECT_TRUE(std::isinf(cycle_overhead(p, 1e-3)));
  EXPECT_EQ(utilization(p, 1e-3), 0.0);
}

TEST(WastedTime, MatchesQuadratureOracle) {
  const PolicyParams p = Reference();
  EXPECT_NEAR(expected_wasted_time(p, 1.0 / 300.0), 141.68205805286135, 1e-9);
  for (double interval : {30.0, 300.0, 1800.0, 7200.0}) {
    const double lambda = 1.0 / interval;
    const double want = oracle::quadrature_wasted_time(p.job_failure_rate(), lambda);
    EXPECT_NEAR(expected_wasted_time(p, lambda), want, 1e-8 * want) << interval;
  }
}

TEST(WastedTime, MatchesMonteCarlo) {
  const PolicyParams p = Reference();
  const double interval = 300.0;
  std::mt19937_64 gen(12345);
  std::exponential_distribution<double> life(p.job_failure_rate());
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) sum += std::fmod(life(gen), interval);
  EXPECT_NEAR(sum / n, expected_wasted_time(p, 1.0 / interval), 0.01 * 141.682);
}

TEST(WastedTime, BoundedByCycleAndMeanLifetime) {
  for (int k : {1, 4, 32}) {
    const PolicyParams p = Reference(k);
    for (double interval = 1.0; interval < 1e6; interval *= 1.7) {
      const double w = expected_wasted_time(p, 1.0 / interval);
      EXPECT_GE(w, 0.0);
      EXPECT_LE(w, std::min(interval / 2.0 + 1e-9, p.job_mtbf()));
    }
  }
}

TEST(CycleOverhead, ReferencePoint) {
  const PolicyParams p = Reference();
  const auto b = cycle_breakdown(p, 1.0 / 300.0);
  EXPECT_NEAR(b.cycle_overhead, 95.83180383178508, 1e-8);
  EXPECT_NEAR(b.utilization, 0.6805606538940496, 1e-12);
  EXPECT_DOUBLE_EQ(b.cycle_overhead, cycle_overhead(p, 1.0 / 300.0));
  EXPECT_DOUBLE_EQ(b.utilization, utilization(p, 1.0 / 300.0));
}

TEST(Utilization, ZeroWhenOverheadFillsTheCycle) {
  EXPECT_EQ(utilization_for_overhead(450.0, 1.0 / 300.0), 0.0);
  EXPECT_EQ(utilization_for_overhead(300.0, 1.0 / 300.0), 0.0);
  EXPECT_NEAR(utilization_for_overhead(150.0, 1.0 / 300.0), 0.5, 1e-15);
}

TEST(Utilization, StaysInUnitInterval) {
  for (int k : {1, 2, 8, 32, 64}) {
    for (double mtbf : {600.0, 3600.0, 14400.0, 86400.0}) {
      const PolicyParams p{1.0 / mtbf, k, 20.0, 50.0};
      for (double interval = 0.5; interval < 2e5; interval *= 1.3) {
        const double u = utilization(p, 1.0 / interval);
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
      }
    }
  }
}

TEST(OptimalLambda, ReferencePoint) {
  const auto out = optimal_lambda(Reference());
  EXPECT_NEAR(out.lambda_star, 0.0057763914673828595, 1e-15);
  EXPECT_NEAR(out.interval, 173.11846083262, 1e-8);
  EXPECT_NEAR(out.utilization_at_star, 0.7205618111236041, 1e-12);
  EXPECT_TRUE(out.feasible);
  EXPECT_EQ(out.clamp, Clamp::kNone);

  const auto [grid, grid_u] = oracle::grid_argmax(8 * kMu, 20.0, 50.0, kMinRate, 1.0 / 40.0);
  EXPECT_NEAR(out.lambda_star, grid, 1e-3 * grid);
  EXPECT_NEAR(out.utilization_at_star, grid_u, 1e-9);
}

TEST(OptimalLambda, ShorterMtbf) {
  const auto out = optimal_lambda(PolicyParams{1.0 / 4000.0, 8, 20.0, 50.0});
  EXPECT_NEAR(out.lambda_star, 0.008062316626236458, 1e-14);
}

TEST(OptimalLambda, SinglePeer) {
  const auto out = optimal_lambda(PolicyParams{1.0 / 14400.0, 1, 20.0, 50.0});
  EXPECT_NEAR(out.lambda_star, 0.0013428999294547324, 1e-14);
  EXPECT_NEAR(out.utilization_at_star, 0.9432707672304499, 1e-12);
}

TEST(OptimalLambda, IsStationaryPointOfUtilization) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> rate(1.0 / 14400.0, 1.0 / 1000.0);
  std::uniform_int_distribution<int> peers(2, 32);
  std::uniform_real_distribution<double> v(5.0, 60.0);
  std::uniform_real_distribution<double> td(10.0, 120.0);
  for (int i = 0; i < 100; ++i) {
    const PolicyParams p{rate(gen), peers(gen), v(gen), td(gen)};
    const auto out = optimal_lambda(p);
    const auto [grid, u] = oracle::grid_argmax(p.job_failure_rate(), p.checkpoint_overhead,
                                               p.download_overhead, kMinRate,
                                               max_rate(p.checkpoint_overhead), 20000);
    EXPECT_NEAR(out.lambda_star, grid, 5e-3 * grid)
        << "mu=" << p.failure_rate << " k=" << p.peers << " V=" << p.checkpoint_overhead
        << " Td=" << p.download_overhead;
  }
}

TEST(OptimalLambda, ZeroOverheadTakesUpperClamp) {
  const auto out = optimal_lambda(PolicyParams{kMu, 8, 0.0, 50.0});
  EXPECT_EQ(out.clamp, Clamp::kMax);
  EXPECT_DOUBLE_EQ(out.lambda_star, kMaxRateWithoutOverhead);
  EXPECT_DOUBLE_EQ(max_rate(0.0), kMaxRateWithoutOverhead);
  EXPECT_DOUBLE_EQ(max_rate(20.0), 1.0 / 40.0);
}

TEST(OptimalLambda, RareFailuresTakeLowerClamp) {
  const auto out = optimal_lambda(PolicyParams{1e-12, 1, 600.0, 0.0});
  EXPECT_EQ(out.clamp, Clamp::kMin);
  EXPECT_DOUBLE_EQ(out.lambda_star, kMinRate);
  EXPECT_DOUBLE_EQ(out.interval, 86400.0);
}

TEST(OptimalLambda, MonotoneInInputs) {
  double prev = 0.0;
  for (double mtbf = 20000.0; mtbf > 500.0; mtbf *= 0.8) {
    const double l = optimal_lambda(PolicyParams{1.0 / mtbf, 8, 20.0, 50.0}).lambda_star;
    EXPECT_GT(l, prev);
    prev = l;
  }
  prev = std::numeric_limits<double>::infinity();
  for (double v = 1.0; v < 200.0; v *= 1.5) {
    const double l = optimal_lambda(PolicyParams{kMu, 8, v, 50.0}).lambda_star;
    EXPECT_LT(l, prev);
    prev = l;
  }
  prev = 1.0;
  for (int k = 1; k <= 49; ++k) {
    const double u = optimal_lambda(Reference(k)).utilization_at_star;
    EXPECT_LT(u, prev);
    prev = u;
  }
}

TEST(Feasibility, StallsFromFiftyPeers) {
  const auto at49 = optimal_lambda(Reference(49));
  EXPECT_NEAR(at49.utilization_at_star, 0.011848025356477998, 1e-10);
  EXPECT_NEAR(at49.lambda_star, 0.01725858709169001, 1e-13);
  EXPECT_EQ(feasibility(Reference(49)), Feasibility::kProgressing);

  const auto at50 = optimal_lambda(Reference(50));
  EXPECT_NEAR(at50.lambda_star, 0.017494661199678362, 1e-13);
  EXPECT_EQ(at50.utilization_at_star, 0.0);
  EXPECT_FALSE(at50.feasible);
  EXPECT_EQ(feasibility(Reference(50)), Feasibility::kStalled);
  EXPECT_EQ(feasibility(Reference(200)), Feasibility::kStalled);
  EXPECT_EQ(to_string(Feasibility::kStalled), "stalled");
}

TEST(SinglePeer, AgreesBitForBitWithOnePeerJob) {
  for (double mtbf : {100.0, 7200.0, 1e6}) {
    const PolicyParams p{1.0 / mtbf, 1, 20.0, 50.0};
    for (double interval : {1.0, 60.0, 300.0, 86400.0}) {
      const double lambda = 1.0 / interval;
      EXPECT_EQ(single_peer::failure_pdf(interval, p.failure_rate), failure_pdf(interval, p));
      EXPECT_EQ(single_peer::mean_fault_free_cycles(p.failure_rate, lambda),
                mean_fault_free_cycles(p, lambda));
      EXPECT_EQ(single_peer::expected_wasted_time(p.failure_rate, lambda),
                expected_wasted_time(p, lambda));
    }
  }
}

TEST(PolicyParams, Validation) {
  EXPECT_THROW(optimal_lambda(PolicyParams{0.0, 8, 20.0, 50.0}), std::invalid_argument);
  EXPECT_THROW(optimal_lambda(PolicyParams{kMu, 0, 20.0, 50.0}), std::invalid_argument);
  EXPECT_THROW(optimal_lambda(PolicyParams{kMu, 8, -1.0, 50.0}), std::invalid_argument);
  EXPECT_THROW(optimal_lambda(PolicyParams{kMu, 8, 20.0, -1.0}), std::invalid_argument);
  EXPECT_THROW(optimal_lambda(PolicyParams{std::nan(""), 8, 20.0, 50.0}), std::invalid_argument);
}

}  // namespace
}  // namespace p2pckpt::policy
