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

// Report metrics and the infrastructure cost model for one simulation run.

#ifndef RISKBATCH_METRICS_H_
#define RISKBATCH_METRICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "riskbatch/domain.h"
#include "riskbatch/engine.h"
#include "riskbatch/resolver.h"

namespace riskbatch {

// Cost per infrastructure hour implied by a known baseline.
struct CostModel {
  double baseline_cost = 390000.0;
  double baseline_infra_hours = 112108.0;

  // Throws ConfigError unless both fields are positive.
  double rate() const;
};

struct InfraCost {
  double infra_hours = 0.0;
  double cost = 0.0;
};

// Sums every executed job's duration. Throws ConfigError for rate <= 0.
InfraCost ComputeInfraCost(std::span<const TestJob> jobs,
                           const CommitStream& stream, double rate);

struct FeedbackTimes {
  // Hours from landing to the first batch-job result covering each commit;
  // empty for commits that never received one.
  std::vector<std::optional<double>> hours;
  std::size_t untested = 0;

  double Mean() const;
};

// A commit's first result is the earliest-ending batch job of any batch that
// contains it. A commit whose batches ran no jobs takes the earliest job of
// any later batch whose newest commit follows it.
FeedbackTimes ComputeFeedbackTimes(const SimulationResult& result,
                                   const CommitStream& stream);

struct TtcSummary {
  std::optional<double> mean_hours;
  std::optional<double> max_hours;
};

TtcSummary SummarizeTtc(std::span<const CulpritRecord> culprits);

struct SimulationReport {
  std::string strategy;
  std::size_t total_tests = 0;
  std::size_t batch_tests = 0;
  std::size_t backfill_tests = 0;
  std::size_t batches = 0;
  double mean_feedback_hours = 0.0;
  std::optional<double> mean_ttc_hours;
  std::optional<double> max_ttc_hours;
  double infra_usage_hours = 0.0;
  double cost = 0.0;
  std::optional<double> cost_savings_pct;
  std::size_t regressors = 0;
  std::size_t undetected_regressors = 0;
  std::size_t untested_commits = 0;
  std::vector<CulpritRecord> culprits;
  std::vector<std::string> undetected_ids;
};

// Throws InvariantError if the job counts disagree with the log.
SimulationReport Summarize(std::string_view strategy,
                           const SimulationResult& result,
                           const CommitStream& stream, double rate);

// Fills cost_savings_pct relative to `baseline`.
void ApplySavings(SimulationReport& report, const SimulationReport& baseline);

nlohmann::json ReportToJson(const SimulationReport& report);
// Throws ParseError on a malformed report.
SimulationReport ReportFromJson(const nlohmann::json& j);

// Column set: strategy, total_tests, mean_feedback_hours, mean_ttc_hours,
// max_ttc_hours, infra_usage_hours, cost and, when requested, cost_savings_pct.
std::string ReportsToCsv(std::span<const SimulationReport> reports,
                         bool with_savings);

struct ParetoAnnotation {
  std::string strategy;
  bool dominated = false;
  // Set when this strategy is no worse than the baseline on total tests,
  // mean feedback, mean TTC and max TTC, strictly better on one of them, and
  // leaves no more regressors undetected.
  bool pareto_improvement = false;
};

// Domination on (total_tests, max TTC). A missing max TTC counts as zero
// when nothing went undetected and as unbounded otherwise.
std::vector<ParetoAnnotation> AnnotatePareto(
    std::span<const SimulationReport> reports,
    std::optional<std::size_t> baseline);

nlohmann::json ParetoToJson(std::span<const ParetoAnnotation> annotations);

}  // namespace riskbatch

#endif  // RISKBATCH_METRICS_H_
