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

#include "p2pckpt/lambert_w.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace p2pckpt {
namespace {

constexpr int kMaxIterations = 64;
constexpr double kStepTolerance = 1e-15;

double InitialGuess(double x) {
  if (x < -0.25) {
    // Branch-point expansion in p = sqrt(2 (1 + e x)).
    const double p = std::sqrt(2.0 * (1.0 + std::numbers::e * x));
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 - p * 43.0 / 540.0)));
  }
  if (x < 0.5) return x * (1.0 + x * (-1.0 + x * (1.5 - x * 8.0 / 3.0)));
  if (x < 3.0) return std::log1p(x) * (1.0 - std::log1p(std::log1p(x)) / (2.0 + std::log1p(x)));
  const double l = std::log(x);
  const double ll = std::log(l);
  return l - ll + ll / l;
}

// Halley on f(w) = w e^w - x; adequate while e^w stays small.
double RefineDirect(double x, double w) {
  for (int i = 0; i < kMaxIterations; ++i) {
    if (w == -1.0) return w;
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    if (denom == 0.0 || !std::isfinite(denom)) return w;
    double next = w - f / denom;
    if (next < -1.0) next = -1.0;
    if (std::abs(next - w) <= kStepTolerance * (1.0 + std::abs(next))) return next;
    w = next;
  }
  return w;
}

// Halley on g(w) = w + ln w - ln x, which never overflows for large x.
double RefineLog(double x, double w) {
  const double lx = std::log(x);
  for (int i = 0; i < kMaxIterations; ++i) {
    const double g = w + std::log(w) - lx;
    const double g1 = 1.0 + 1.0 / w;
    const double g2 = -1.0 / (w * w);
    const double next = w - 2.0 * g * g1 / (2.0 * g1 * g1 - g * g2);
    if (std::abs(next - w) <= kStepTolerance * (1.0 + std::abs(next))) return next;
    w = next;
  }
  return w;
}

}  // namespace

double lambert_w0(double x) {
  if (std::isnan(x) || x < kLambertBranchPoint - kLambertDomainSlack) {
    throw std::domain_error("lambert_w0: argument " + std::to_string(x) +
                            " is below the branch point -1/e");
  }
  if (x <= kLambertBranchPoint) return -1.0;
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return x;
  const double guess = InitialGuess(x);
  if (x > std::numbers::e) return RefineLog(x, guess);
  return RefineDirect(x, guess);
}

}  // namespace p2pckpt
