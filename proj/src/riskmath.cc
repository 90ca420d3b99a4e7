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

#include "riskbatch/riskmath.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "riskbatch/errors.h"

namespace riskbatch::riskmath {
namespace {

void CheckProbability(double r) {
  if (!(r >= 0.0 && r <= 1.0))
    throw ValidationError("risk " + std::to_string(r) + " outside [0, 1]");
}

}  // namespace

double BatchFailProb(std::span<const double> risks) {
  double log_survival = 0.0;
  bool certain = false;
  for (double r : risks) {
    CheckProbability(r);
    if (r == 1.0) {
      certain = true;
      continue;
    }
    log_survival += std::log1p(-r);
  }
  if (certain) return 1.0;
  return -std::expm1(log_survival);
}

double AgedRisk(double risk, double wait_hours, double aging_rate) {
  CheckProbability(risk);
  if (!(wait_hours >= 0.0))
    throw ValidationError("wait must be non-negative");
  if (!(aging_rate >= 0.0))
    throw ValidationError("aging rate must be non-negative");
  const double exponent = aging_rate * wait_hours;
  if (exponent == 0.0) return risk;
  const double aged = 1.0 - (1.0 - risk) * std::exp(-exponent);
  // 1 - (1 - r) can round below r; the floor keeps the result monotone.
  return std::clamp(aged, risk, 1.0);
}

double LinearRiskSum(std::span<const double> risks) {
  double sum = 0.0;
  for (double r : risks) {
    CheckProbability(r);
    sum += r;
  }
  return sum;
}

}  // namespace riskbatch::riskmath
