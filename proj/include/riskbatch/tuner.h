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

// NSGA-II search over a strategy's parameters, minimizing total tests and
// max TTC on one stream.
//
// Every evaluated point is memoized; offspring that repeat an evaluated point
// are re-mutated or replaced by an unseen random point, so small integer
// spaces are enumerated instead of re-sampled.

#ifndef RISKBATCH_TUNER_H_
#define RISKBATCH_TUNER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "riskbatch/domain.h"
#include "riskbatch/engine.h"
#include "riskbatch/metrics.h"
#include "riskbatch/strategies.h"

namespace riskbatch {

struct ParamBound {
  // One of the StrategyConfig fields: window_hours, batch_size, threshold,
  // aging_rate, high_risk_trigger.
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  bool integer = false;

  bool operator==(const ParamBound&) const = default;
};

struct ParamSpace {
  std::vector<ParamBound> params;

  std::size_t dimension() const { return params.size(); }
  // Throws ConfigError on unknown names, duplicates or lo >= hi.
  void Validate() const;
  // Rounds integer genes and clamps every gene into its bounds.
  std::vector<double> Normalize(std::vector<double> genes) const;
  StrategyConfig Apply(StrategyKind kind, std::span<const double> genes) const;
};

// Search bounds used when a run configuration gives none. Throws ConfigError
// for kinds without tunable parameters.
ParamSpace DefaultSpace(StrategyKind kind);

struct Objectives {
  double total_tests = 0.0;
  double max_ttc_hours = 0.0;

  bool operator==(const Objectives&) const = default;
};

// x dominates y iff x <= y in both objectives and x < y in at least one.
bool Dominates(const Objectives& x, const Objectives& y);

struct Individual {
  std::vector<double> genes;
  Objectives objectives;
  std::size_t undetected = 0;
  double mean_feedback_hours = 0.0;
  std::optional<double> mean_ttc_hours;
  std::size_t evaluation = 0;  // order of evaluation, from 0
  std::size_t rank = 0;
  double crowding = 0.0;

  bool feasible() const { return undetected == 0; }
};

struct TuneBudget {
  std::size_t evaluations = 0;
  std::size_t population = 0;
  std::uint64_t seed = 0;

  // 50 evaluations per parameter; population min(evaluations / 2, 20 d).
  static TuneBudget ForDimension(std::size_t d, std::uint64_t seed);
  // Throws ConfigError.
  void Validate() const;
};

// Fronts of point indices, best first. With `violation` supplied, a point
// with lower violation dominates one with higher violation regardless of
// objectives, and equal violations compare by objectives.
std::vector<std::vector<std::size_t>> NondominatedSort(
    std::span<const Objectives> points,
    std::span<const double> violation = {});

// Boundary points per objective get +inf; interior points get the sum over
// objectives of the neighbor gap divided by the objective's range.
std::vector<double> CrowdingDistance(std::span<const Objectives> front);

struct TuneOptions {
  std::size_t threads = 1;
  // Selection bound on max TTC, normally the baseline's max TTC on the same
  // stream. Without it the cheapest feasible front member is chosen.
  std::optional<double> ttc_bound;
  // Called once per evaluation, in evaluation order, from the calling thread.
  std::function<void(const Individual&)> on_evaluation;
};

struct TuneResult {
  StrategyKind kind;
  ParamSpace space;
  std::vector<Individual> evaluated;  // in evaluation order
  std::vector<Individual> front;      // non-dominated over `evaluated`
  Individual chosen;
  StrategyConfig chosen_config;
};

// Throws ValidationError when no evaluated point is feasible.
TuneResult Tune(StrategyKind kind, const ParamSpace& space,
                const CommitStream& eval_stream, const EngineConfig& engine,
                const TuneBudget& budget, const TuneOptions& options = {});

// Among the feasible candidates: fewest total tests with max TTC within
// `ttc_bound`, else lowest max TTC. Remaining ties go to lower max TTC (or
// fewer tests), then to the earlier evaluation. The result is never dominated
// by another feasible candidate. Throws ValidationError when none is
// feasible.
const Individual& SelectChosen(std::span<const Individual> candidates,
                               std::optional<double> ttc_bound);

Individual Evaluate(StrategyKind kind, const ParamSpace& space,
                    std::span<const double> genes, const CommitStream& stream,
                    const EngineConfig& engine);

SimulationReport Replay(const StrategyConfig& config,
                        const CommitStream& test_stream,
                        const EngineConfig& engine, double rate);

nlohmann::json StrategyConfigToJson(const StrategyConfig& config);
// Throws ConfigError.
StrategyConfig StrategyConfigFromJson(const nlohmann::json& j);

nlohmann::json TuneResultToJson(const TuneResult& result);

}  // namespace riskbatch

#endif  // RISKBATCH_TUNER_H_
