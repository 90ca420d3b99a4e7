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

#include "riskbatch/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "riskbatch/errors.h"

namespace riskbatch {

double CostModel::rate() const {
  if (!(baseline_cost > 0.0) || !(baseline_infra_hours > 0.0))
    throw ConfigError("cost model baseline cost and hours must be positive");
  return baseline_cost / baseline_infra_hours;
}

InfraCost ComputeInfraCost(std::span<const TestJob> jobs,
                           const CommitStream& stream, double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw ConfigError("infrastructure cost rate must be positive");
  Time seconds = 0;
  for (const TestJob& job : jobs)
    seconds += stream.group(job.group).DurationSeconds();
  InfraCost out;
  out.infra_hours = SecondsToHours(seconds);
  out.cost = out.infra_hours * rate;
  return out;
}

double FeedbackTimes::Mean() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& h : hours) {
    if (!h) continue;
    sum += *h;
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

FeedbackTimes ComputeFeedbackTimes(const SimulationResult& result,
                                   const CommitStream& stream) {
  constexpr Time kNever = std::numeric_limits<Time>::max();
  const std::size_t n = stream.size();
  std::vector<Time> first(n, kNever);
  // Earliest job end of any batch whose newest commit is at or after c.
  std::vector<Time> later(n + 1, kNever);
  for (const Batch& batch : result.batches) {
    if (batch.jobs.empty()) continue;
    Time earliest = kNever;
    for (std::size_t id : batch.jobs)
      earliest = std::min(earliest, result.jobs[id].end_time);
    for (CommitIndex c = batch.first; c <= batch.last; ++c)
      first[c] = std::min(first[c], earliest);
    later[batch.last] = std::min(later[batch.last], earliest);
  }
  for (std::size_t c = n; c-- > 0;) later[c] = std::min(later[c], later[c + 1]);

  FeedbackTimes out;
  out.hours.resize(n);
  for (CommitIndex c = 0; c < n; ++c) {
    Time at = first[c];
    if (at == kNever) at = later[c + 1];
    if (at == kNever) {
      ++out.untested;
      continue;
    }
    out.hours[c] = SecondsToHours(at - stream[c].land_time);
  }
  return out;
}

TtcSummary SummarizeTtc(std::span<const CulpritRecord> culprits) {
  TtcSummary out;
  if (culprits.empty()) return out;
  double sum = 0.0;
  double max = 0.0;
  for (const CulpritRecord& r : culprits) {
    sum += r.ttc_hours;
    max = std::max(max, r.ttc_hours);
  }
  out.mean_hours = sum / static_cast<double>(culprits.size());
  out.max_hours = max;
  return out;
}

SimulationReport Summarize(std::string_view strategy,
                           const SimulationResult& result,
                           const CommitStream& stream, double rate) {
  if (result.batch_job_count + result.backfill_job_count != result.jobs.size())
    throw InvariantError("job counters disagree with the event log");
  SimulationReport r;
  r.strategy = std::string(strategy);
  r.total_tests = result.jobs.size();
  r.batch_tests = result.batch_job_count;
  r.backfill_tests = result.backfill_job_count;
  r.batches = result.batches.size();
  const FeedbackTimes feedback = ComputeFeedbackTimes(result, stream);
  r.mean_feedback_hours = feedback.Mean();
  r.untested_commits = feedback.untested;
  if (feedback.untested > 0 &&
      std::all_of(result.batches.begin(), result.batches.end(),
                  [](const Batch& b) { return b.suite.mode == SuiteMode::kFull; }))
    throw InvariantError("commit never tested under a full-suite strategy");
  const TtcSummary ttc = SummarizeTtc(result.culprits);
  r.mean_ttc_hours = ttc.mean_hours;
  r.max_ttc_hours = ttc.max_hours;
  const InfraCost infra = ComputeInfraCost(result.jobs, stream, rate);
  r.infra_usage_hours = infra.infra_hours;
  r.cost = infra.cost;
  for (const Commit& c : stream.commits()) r.regressors += c.label;
  r.undetected_regressors = result.undetected.size();
  r.culprits = result.culprits;
  for (CommitIndex c : result.undetected) r.undetected_ids.push_back(stream[c].id);
  return r;
}

void ApplySavings(SimulationReport& report, const SimulationReport& baseline) {
  if (!(baseline.cost > 0.0)) {
    report.cost_savings_pct.reset();
    return;
  }
  report.cost_savings_pct = 100.0 * (1.0 - report.cost / baseline.cost);
}

namespace {

nlohmann::json OptionalNumber(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> ReadOptional(const nlohmann::json& j,
                                   const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string Fixed(const std::optional<double>& v, int digits) {
  return v ? Fixed(*v, digits) : std::string();
}

std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

double MaxTtcKey(const SimulationReport& r) {
  if (r.max_ttc_hours) return *r.max_ttc_hours;
  return r.undetected_regressors == 0 ? 0.0
                                      : std::numeric_limits<double>::infinity();
}

double MeanTtcKey(const SimulationReport& r) {
  if (r.mean_ttc_hours) return *r.mean_ttc_hours;
  return r.undetected_regressors == 0 ? 0.0
                                      : std::numeric_limits<double>::infinity();
}

bool Dominates(const SimulationReport& a, const SimulationReport& b) {
  const double at = static_cast<double>(a.total_tests);
  const double bt = static_cast<double>(b.total_tests);
  const double am = MaxTtcKey(a);
  const double bm = MaxTtcKey(b);
  return at <= bt && am <= bm && (at < bt || am < bm);
}

bool ImprovesOn(const SimulationReport& a, const SimulationReport& base) {
  const double lhs[] = {static_cast<double>(a.total_tests), a.mean_feedback_hours,
                        MeanTtcKey(a), MaxTtcKey(a)};
  const double rhs[] = {static_cast<double>(base.total_tests),
                        base.mean_feedback_hours, MeanTtcKey(base),
                        MaxTtcKey(base)};
  bool strict = false;
  for (int k = 0; k < 4; ++k) {
    if (lhs[k] > rhs[k]) return false;
    strict = strict || lhs[k] < rhs[k];
  }
  return strict && a.undetected_regressors <= base.undetected_regressors;
}

}  // namespace

nlohmann::json ReportToJson(const SimulationReport& r) {
  nlohmann::json j;
  j["strategy"] = r.strategy;
  j["total_tests"] = r.total_tests;
  j["batch_tests"] = r.batch_tests;
  j["backfill_tests"] = r.backfill_tests;
  j["batches"] = r.batches;
  j["mean_feedback_hours"] = r.mean_feedback_hours;
  j["mean_ttc_hours"] = OptionalNumber(r.mean_ttc_hours);
  j["max_ttc_hours"] = OptionalNumber(r.max_ttc_hours);
  j["infra_usage_hours"] = r.infra_usage_hours;
  j["cost"] = r.cost;
  j["cost_savings_pct"] = OptionalNumber(r.cost_savings_pct);
  j["regressors"] = r.regressors;
  j["undetected_regressors"] = r.undetected_regressors;
  j["untested_commits"] = r.untested_commits;
  nlohmann::json culprits = nlohmann::json::array();
  for (const CulpritRecord& c : r.culprits) {
    culprits.push_back({{"commit", c.commit_id},
                        {"group", c.group_id},
                        {"land_time", c.land_time},
                        {"identified_at", c.identified_at},
                        {"ttc_hours", c.ttc_hours}});
  }
  j["culprits"] = std::move(culprits);
  j["undetected"] = r.undetected_ids;
  return j;
}

SimulationReport ReportFromJson(const nlohmann::json& j) {
  try {
    SimulationReport r;
    r.strategy = j.at("strategy").get<std::string>();
    r.total_tests = j.at("total_tests").get<std::size_t>();
    r.batch_tests = j.value("batch_tests", r.total_tests);
    r.backfill_tests = j.value("backfill_tests", std::size_t{0});
    r.batches = j.value("batches", std::size_t{0});
    r.mean_feedback_hours = j.at("mean_feedback_hours").get<double>();
    r.mean_ttc_hours = ReadOptional(j, "mean_ttc_hours");
    r.max_ttc_hours = ReadOptional(j, "max_ttc_hours");
    r.infra_usage_hours = j.value("infra_usage_hours", 0.0);
    r.cost = j.value("cost", 0.0);
    r.cost_savings_pct = ReadOptional(j, "cost_savings_pct");
    r.regressors = j.value("regressors", std::size_t{0});
    r.undetected_regressors = j.value("undetected_regressors", std::size_t{0});
    r.untested_commits = j.value("untested_commits", std::size_t{0});
    if (j.contains("culprits")) {
      for (const auto& c : j.at("culprits")) {
        CulpritRecord rec;
        rec.commit_id = c.at("commit").get<std::string>();
        rec.group_id = c.at("group").get<std::string>();
        rec.land_time = c.value("land_time", Time{0});
        rec.identified_at = c.value("identified_at", Time{0});
        rec.ttc_hours = c.at("ttc_hours").get<double>();
        r.culprits.push_back(std::move(rec));
      }
    }
    if (j.contains("undetected"))
      r.undetected_ids = j.at("undetected").get<std::vector<std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
}

std::string ReportsToCsv(std::span<const SimulationReport> reports,
                         bool with_savings) {
  std::string out =
      "strategy,total_tests,mean_feedback_hours,mean_ttc_hours,max_ttc_hours,"
      "infra_usage_hours,cost";
  if (with_savings) out += ",cost_savings_pct";
  out += '\n';
  for (const SimulationReport& r : reports) {
    out += CsvField(r.strategy);
    out += ',' + std::to_string(r.total_tests);
    out += ',' + Fixed(r.mean_feedback_hours, 4);
    out += ',' + Fixed(r.mean_ttc_hours, 4);
    out += ',' + Fixed(r.max_ttc_hours, 4);
    out += ',' + Fixed(r.infra_usage_hours, 4);
    out += ',' + Fixed(r.cost, 2);
    if (with_savings) out += ',' + Fixed(r.cost_savings_pct, 2);
    out += '\n';
  }
  return out;
}

std::vector<ParetoAnnotation> AnnotatePareto(
    std::span<const SimulationReport> reports,
    std::optional<std::size_t> baseline) {
  if (baseline && *baseline >= reports.size())
    throw ConfigError("baseline index out of range");
  std::vector<ParetoAnnotation> out;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    ParetoAnnotation a;
    a.strategy = reports[i].strategy;
    for (std::size_t k = 0; k < reports.size() && !a.dominated; ++k)
      a.dominated = k != i && Dominates(reports[k], reports[i]);
    if (baseline && *baseline != i)
      a.pareto_improvement = ImprovesOn(reports[i], reports[*baseline]);
    out.push_back(std::move(a));
  }
  return out;
}

nlohmann::json ParetoToJson(std::span<const ParetoAnnotation> annotations) {
  nlohmann::json out = nlohmann::json::array();
  for (const ParetoAnnotation& a : annotations) {
    nlohmann::json j;
    j["strategy"] = a.strategy;
    j["dominated"] = a.dominated;
    j["pareto_improvement"] = a.pareto_improvement;
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace riskbatch
