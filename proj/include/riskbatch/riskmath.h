// Copyright 2026 The riskbatch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RISKBATCH_RISKMATH_H_
#define RISKBATCH_RISKMATH_H_

#include <span>

// Risk aggregation kernels shared by the risk-aware strategies. All inputs
// are plain probabilities so callers can feed raw or aged risks alike.
// Every function throws ValidationError on out-of-range input.
namespace riskbatch::riskmath {

// Probability that at least one of independent events occurs,
// 1 - prod(1 - r_i), accumulated as a log-survival sum. Exactly 1 when any
// risk is 1 and exactly 0 for an empty list.
double BatchFailProb(std::span<const double> risks);

// Effective risk after waiting: 1 - (1 - r) * exp(-rate * wait_hours).
// Never below `risk`; equal to it when wait or rate is zero.
double AgedRisk(double risk, double wait_hours, double aging_rate);

// Plain sum of the risks, used by the linear-budget variants.
double LinearRiskSum(std::span<const double> risks);

}  // namespace riskbatch::riskmath

#endif  // RISKBATCH_RISKMATH_H_
