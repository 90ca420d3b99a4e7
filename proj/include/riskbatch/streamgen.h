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

// Synthetic commit streams and signature-group catalogs.
//
// Arrivals are a Poisson process. Clean commits draw risk from Beta(2, 8);
// regressors from Beta(2 + q, 8 - min(q, 6)) with q the risk quality, so q = 0
// gives uninformative scores. Each group runs on its own cadence with a random
// phase, and a commit's selected groups are those whose run falls between its
// landing and the next landing; the catalog records these cadences so the
// time-window baseline replays them exactly.

#ifndef RISKBATCH_STREAMGEN_H_
#define RISKBATCH_STREAMGEN_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>

#include "json.hpp"
#include "riskbatch/domain.h"

namespace riskbatch {

struct GenSpec {
  std::size_t n_commits = 1000;
  double mean_interarrival_minutes = 15.0;
  double positive_rate = 0.01;
  double risk_quality = 0.0;
  // When set, overrides risk_quality with the value whose population AUC
  // equals this target.
  std::optional<double> target_auc;
  // Indexed by Platform: Android, Windows, Linux, MacOS.
  std::array<int, 4> groups_per_platform = {10, 10, 10, 10};
  double group_duration_minutes = 20.0;
  double min_period_hours = 2.0;
  double max_period_hours = 12.0;
  int min_failing_groups = 1;
  int max_failing_groups = 3;
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void Validate() const;
};

CommitStream Generate(const GenSpec& spec);

// Regressor ids with their failing groups, plus the realized AUC.
nlohmann::json TruthSidecar(const CommitStream& stream, const GenSpec& spec);

// P(regressor risk > clean risk) for risk quality q, by quadrature.
double PopulationAuc(double q);
// Smallest q >= 0 whose population AUC reaches `target`, to 1e-6.
// Throws ConfigError for targets outside [0.5, 0.999].
double CalibrateRiskQuality(double target);
// Mann-Whitney AUC of risk against label, ties counted half; nullopt unless
// both classes are present.
std::optional<double> EmpiricalAuc(const CommitStream& stream);

}  // namespace riskbatch

#endif  // RISKBATCH_STREAMGEN_H_
