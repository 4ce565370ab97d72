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

#ifndef P2PCKPT_LAMBERT_W_H_
#define P2PCKPT_LAMBERT_W_H_

namespace p2pckpt {

// Smallest admissible argument of the principal branch, -1/e.
inline constexpr double kLambertBranchPoint = -0.36787944117144233;

// Arguments within this distance below the branch point are snapped onto it.
inline constexpr double kLambertDomainSlack = 1e-12;

// Principal branch W0 of the Lambert W function: the w >= -1 solving
// w * exp(w) == x. Halley iteration from a branch-point series (near -1/e),
// a Taylor guess (small |x|) or the asymptotic log expansion (large x).
//
// Throws std::domain_error for NaN or x < -1/e - kLambertDomainSlack.
double lambert_w0(double x);

}  // namespace p2pckpt

#endif  // P2PCKPT_LAMBERT_W_H_
