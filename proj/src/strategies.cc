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

#include "riskbatch/strategies.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>

#include "riskbatch/errors.h"
#include "riskbatch/riskmath.h"

namespace riskbatch {
namespace {

struct FamilyInfo {
  Family family;
  std::string_view name;
  bool allows_linear;
  bool allows_subset;
};

constexpr FamilyInfo kFamilies[] = {
    {Family::kET, "et", false, false},     {Family::kTWSB, "twsb", false, false},
    {Family::kTWB, "twb", false, true},    {Family::kFSB, "fsb", false, true},
    {Family::kRASB, "rasb", true, true},   {Family::kRAPB, "rapb", true, true},
    {Family::kRATB, "ratb", false, true},
};

const FamilyInfo& InfoFor(Family family) {
  for (const FamilyInfo& info : kFamilies)
    if (info.family == family) return info;
  throw InvariantError("unknown strategy family");
}

// Window lengths are truncated to whole seconds so a flush at the deadline
// never exceeds the configured window.
Time WindowSeconds(double hours) {
  return std::max<Time>(
      1, static_cast<Time>(std::floor(hours * kSecondsPerHour + 1e-6)));
}

double WaitHours(Time now, Time land_time) {
  return SecondsToHours(std::max<Time>(0, now - land_time));
}

// Smallest t >= lo with pred(t) true, for a predicate monotone in t, searched
// outward from `guess`. Returns nullopt if pred stays false up to `limit`.
std::optional<Time> FirstTrue(const std::function<bool(Time)>& pred, Time lo,
                              Time guess, Time limit) {
  guess = std::clamp(guess, lo, limit);
  Time false_at;
  Time true_at;
  if (pred(guess)) {
    if (guess == lo || !pred(guess - 1)) return guess;
    if (pred(lo)) return lo;
    false_at = lo;
    true_at = guess - 1;
  } else {
    false_at = guess;
    Time step = 1;
    for (;;) {
      if (false_at >= limit) return std::nullopt;
      const Time probe = (limit - false_at > step) ? false_at + step : limit;
      if (pred(probe)) {
        true_at = probe;
        break;
      }
      false_at = probe;
      step *= 2;
    }
  }
  while (true_at - false_at > 1) {
    const Time mid = false_at + (true_at - false_at) / 2;
    if (pred(mid)) {
      true_at = mid;
    } else {
      false_at = mid;
    }
  }
  return true_at;
}

constexpr Time kFarFuture = std::numeric_limits<Time>::max() / 4;

// Shared machinery for strategies with a single pending batch.
class PendingStrategy : public Strategy {
 public:
  PendingStrategy(const CommitStream& stream, SuiteMode mode)
      : stream_(stream), mode_(mode), in_union_(stream.group_count(), 0) {}

  std::vector<BatchDecision> OnCommit(CommitIndex index, Time now) final {
    Advance(now);
    std::vector<BatchDecision> out;
    // Only reachable when no wake-up was delivered for an earlier deadline.
    if (!empty()) {
      auto deadline = Deadline();
      if (deadline && *deadline < now) out.push_back(Flush());
    }
    if (empty()) {
      first_ = index;
      opened_at_ = now;
    } else if (index != last_ + 1) {
      throw InvariantError("commits must arrive in stream order");
    }
    last_ = index;
    has_pending_ = true;
    if (mode_ == SuiteMode::kSubset) {
      for (GroupIndex g : stream_.selected(index)) {
        if (!in_union_[g]) {
          in_union_[g] = 1;
          union_.push_back(g);
        }
      }
    }
    Appended(index, now);
    if (FlushOnArrival(index, now)) out.push_back(Flush());
    return out;
  }

  std::vector<BatchDecision> OnTick(Time now) final {
    Advance(now);
    if (!empty() && DueAt(now)) return {Flush()};
    return {};
  }

  std::vector<BatchDecision> FlushResidual(Time stream_end) final {
    Advance(stream_end);
    if (empty()) return {};
    return {Flush()};
  }

  std::optional<Time> NextDeadline() const final {
    if (empty()) return std::nullopt;
    return Deadline();
  }

 protected:
  bool empty() const { return !has_pending_; }
  Time opened_at() const { return opened_at_; }
  Time now() const { return now_; }
  CommitIndex first() const { return first_; }
  CommitIndex last() const { return last_; }
  const CommitStream& stream() const { return stream_; }

  virtual void Appended(CommitIndex /*index*/, Time /*now*/) {}
  virtual bool FlushOnArrival(CommitIndex index, Time now) = 0;
  virtual bool DueAt(Time /*now*/) const { return false; }
  virtual std::optional<Time> Deadline() const { return std::nullopt; }
  virtual void Reset() {}

 private:
  void Advance(Time now) {
    if (now < now_)
      throw InvariantError("strategy consulted at " + std::to_string(now) +
                           " after " + std::to_string(now_));
    now_ = now;
  }

  BatchDecision Flush() {
    BatchDecision d;
    d.first = first_;
    d.last = last_;
    d.suite.mode = mode_;
    if (mode_ == SuiteMode::kFull) {
      d.suite.groups.resize(stream_.group_count());
      std::iota(d.suite.groups.begin(), d.suite.groups.end(), GroupIndex{0});
    } else {
      d.suite.groups = union_;
      std::sort(d.suite.groups.begin(), d.suite.groups.end());
      for (GroupIndex g : union_) in_union_[g] = 0;
      union_.clear();
    }
    has_pending_ = false;
    Reset();
    return d;
  }

  const CommitStream& stream_;
  SuiteMode mode_;
  bool has_pending_ = false;
  CommitIndex first_ = 0;
  CommitIndex last_ = 0;
  Time opened_at_ = 0;
  Time now_ = std::numeric_limits<Time>::min();
  std::vector<char> in_union_;
  std::vector<GroupIndex> union_;
};

class Exhaustive final : public PendingStrategy {
 public:
  using PendingStrategy::PendingStrategy;

 private:
  bool FlushOnArrival(CommitIndex, Time) override { return true; }
};

class TimeWindow final : public PendingStrategy {
 public:
  TimeWindow(const CommitStream& stream, SuiteMode mode, double window_hours)
      : PendingStrategy(stream, mode), window_(WindowSeconds(window_hours)) {}

 private:
  bool FlushOnArrival(CommitIndex, Time now) override { return DueAt(now); }
  bool DueAt(Time now) const override { return now >= opened_at() + window_; }
  std::optional<Time> Deadline() const override {
    return opened_at() + window_;
  }

  Time window_;
};

class FixedSize final : public PendingStrategy {
 public:
  FixedSize(const CommitStream& stream, SuiteMode mode, int batch_size)
      : PendingStrategy(stream, mode),
        batch_size_(static_cast<std::size_t>(batch_size)) {}

 private:
  bool FlushOnArrival(CommitIndex index, Time) override {
    return index - first() + 1 >= batch_size_;
  }

  std::size_t batch_size_;
};

// RASB and RASB-la: risk is static, so only arrivals can trigger a flush.
class StreamRisk final : public PendingStrategy {
 public:
  StreamRisk(const CommitStream& stream, SuiteMode mode, Aggregation agg,
             double threshold)
      : PendingStrategy(stream, mode), agg_(agg), threshold_(threshold) {}

 private:
  void Appended(CommitIndex index, Time) override {
    risks_.push_back(stream()[index].risk);
  }
  bool FlushOnArrival(CommitIndex, Time) override {
    const double score = agg_ == Aggregation::kLinear
                             ? riskmath::LinearRiskSum(risks_)
                             : riskmath::BatchFailProb(risks_);
    return score > threshold_;
  }
  void Reset() override { risks_.clear(); }

  Aggregation agg_;
  double threshold_;
  std::vector<double> risks_;
};

// RAPB and RAPB-la: aggregate aged risks, which grow with waiting time.
class AgedPriority final : public PendingStrategy {
 public:
  AgedPriority(const CommitStream& stream, SuiteMode mode, Aggregation agg,
               double threshold, double aging_rate)
      : PendingStrategy(stream, mode),
        agg_(agg),
        threshold_(threshold),
        aging_rate_(aging_rate) {}

 private:
  void Appended(CommitIndex index, Time) override { pending_.push_back(index); }
  bool FlushOnArrival(CommitIndex, Time now) override {
    if (Exceeds(now)) return true;
    deadline_ = ComputeDeadline(now);
    return false;
  }
  bool DueAt(Time now) const override { return Exceeds(now); }
  std::optional<Time> Deadline() const override { return deadline_; }
  void Reset() override {
    pending_.clear();
    deadline_.reset();
  }

  bool Exceeds(Time at) const {
    aged_.clear();
    for (CommitIndex i : pending_)
      aged_.push_back(riskmath::AgedRisk(
          stream()[i].risk, WaitHours(at, stream()[i].land_time), aging_rate_));
    const double score = agg_ == Aggregation::kLinear
                             ? riskmath::LinearRiskSum(aged_)
                             : riskmath::BatchFailProb(aged_);
    return score > threshold_;
  }

  // Closed-form estimate of the crossing instant, refined against Exceeds()
  // so the deadline agrees with the predicate to the second.
  std::optional<Time> ComputeDeadline(Time now) const {
    if (aging_rate_ <= 0.0 || pending_.empty()) return std::nullopt;
    const double k = static_cast<double>(pending_.size());
    const Time ref = stream()[pending_.back()].land_time;
    double estimate_offset;  // seconds after `ref`
    if (agg_ == Aggregation::kLinear) {
      if (k <= threshold_) return std::nullopt;
      double c = 0.0;
      for (CommitIndex i : pending_)
        c += (1.0 - stream()[i].risk) *
             std::exp(-aging_rate_ * WaitHours(ref, stream()[i].land_time));
      if (c <= 0.0) return now;
      estimate_offset =
          kSecondsPerHour * std::log(c / (k - threshold_)) / aging_rate_;
    } else {
      double log_survival = 0.0;
      double wait_sum = 0.0;  // hours, relative to ref
      for (CommitIndex i : pending_) {
        const double r = stream()[i].risk;
        if (r >= 1.0) return now;
        log_survival += std::log1p(-r);
        wait_sum += WaitHours(ref, stream()[i].land_time);
      }
      // a * (k * u + wait_sum) > log_survival - log(1 - threshold)
      const double need = log_survival - std::log1p(-threshold_);
      estimate_offset =
          kSecondsPerHour * (need / aging_rate_ - wait_sum) / k;
    }
    if (!std::isfinite(estimate_offset)) estimate_offset = 0.0;
    estimate_offset = std::clamp(estimate_offset, -1e15, 1e15);
    const Time guess = ref + static_cast<Time>(std::ceil(estimate_offset));
    return FirstTrue([this](Time t) { return Exceeds(t); }, now, guess,
                     kFarFuture);
  }

  Aggregation agg_;
  double threshold_;
  double aging_rate_;
  std::vector<CommitIndex> pending_;
  std::optional<Time> deadline_;
  mutable std::vector<double> aged_;
};

class RiskTrigger final : public PendingStrategy {
 public:
  RiskTrigger(const CommitStream& stream, SuiteMode mode, double window_hours,
              double trigger)
      : PendingStrategy(stream, mode),
        window_(WindowSeconds(window_hours)),
        trigger_(trigger) {}

 private:
  bool FlushOnArrival(CommitIndex index, Time now) override {
    return stream()[index].risk >= trigger_ || DueAt(now);
  }
  bool DueAt(Time now) const override { return now >= opened_at() + window_; }
  std::optional<Time> Deadline() const override {
    return opened_at() + window_;
  }

  Time window_;
  double trigger_;
};

// Production-style baseline: every signature-group runs on its own fixed
// cadence against the implicit batch of commits landed since its last run.
class PerGroupCadence final : public Strategy {
 public:
  PerGroupCadence(const CommitStream& stream, std::optional<double> window)
      : stream_(stream),
        period_(stream.group_count()),
        phase_(stream.group_count()),
        untested_from_(stream.group_count(), 0) {
    for (GroupIndex g = 0; g < stream.group_count(); ++g) {
      const SignatureGroup& group = stream.group(g);
      const std::optional<double> hours =
          group.period_hours ? group.period_hours : window;
      if (!hours)
        throw ConfigError("twsb: group " + group.id +
                          " has no period_hours and no window_hours fallback "
                          "was configured");
      period_[g] = std::max<Time>(1, HoursToSeconds(*hours));
      phase_[g] = HoursToSeconds(group.phase_hours.value_or(0.0));
    }
  }

  std::vector<BatchDecision> OnCommit(CommitIndex index, Time now) override {
    Advance(now);
    if (index != arrived_)
      throw InvariantError("commits must arrive in stream order");
    if (!started_) {
      started_ = true;
      for (GroupIndex g = 0; g < stream_.group_count(); ++g)
        due_.push({FirstDueAtOrAfter(g, now), g});
    }
    // Runs strictly before this arrival see only earlier commits.
    std::vector<BatchDecision> out = RunDue(now - 1);
    ++arrived_;
    return out;
  }

  std::vector<BatchDecision> OnTick(Time now) override {
    Advance(now);
    return RunDue(now);
  }

  std::vector<BatchDecision> FlushResidual(Time stream_end) override {
    Advance(stream_end);
    std::vector<BatchDecision> out;
    for (GroupIndex g = 0; g < stream_.group_count(); ++g)
      if (untested_from_[g] < arrived_) out.push_back(RunGroup(g));
    finished_ = true;
    return out;
  }

  std::optional<Time> NextDeadline() const override {
    if (!started_ || finished_ || due_.empty()) return std::nullopt;
    return due_.top().first;
  }

 private:
  using Due = std::pair<Time, GroupIndex>;

  void Advance(Time now) {
    if (now < now_)
      throw InvariantError("strategy consulted at " + std::to_string(now) +
                           " after " + std::to_string(now_));
    now_ = now;
  }

  Time FirstDueAtOrAfter(GroupIndex g, Time t) const {
    if (t <= phase_[g]) return phase_[g];
    const Time k = (t - phase_[g] + period_[g] - 1) / period_[g];
    return phase_[g] + k * period_[g];
  }

  std::vector<BatchDecision> RunDue(Time upto) {
    std::vector<BatchDecision> out;
    if (finished_) return out;
    while (!due_.empty() && due_.top().first <= upto) {
      auto [at, g] = due_.top();
      due_.pop();
      if (untested_from_[g] < arrived_) out.push_back(RunGroup(g));
      due_.push({FirstDueAtOrAfter(g, std::max(at, upto) + 1), g});
    }
    return out;
  }

  BatchDecision RunGroup(GroupIndex g) {
    BatchDecision d;
    d.first = untested_from_[g];
    d.last = arrived_ - 1;
    d.suite.mode = SuiteMode::kSubset;
    d.suite.groups = {g};
    untested_from_[g] = arrived_;
    return d;
  }

  const CommitStream& stream_;
  std::vector<Time> period_;
  std::vector<Time> phase_;
  std::vector<CommitIndex> untested_from_;
  std::priority_queue<Due, std::vector<Due>, std::greater<>> due_;
  CommitIndex arrived_ = 0;
  bool started_ = false;
  bool finished_ = false;
  Time now_ = std::numeric_limits<Time>::min();
};

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& ch : out) ch = static_cast<char>(std::tolower(ch));
  return out;
}

}  // namespace

std::string StrategyKind::Name() const {
  std::string name(InfoFor(family).name);
  if (aggregation == Aggregation::kLinear) name += "-la";
  if (suite == SuiteMode::kSubset) name += "-s";
  return name;
}

std::vector<std::string> ValidKindNames() {
  std::vector<std::string> names;
  for (const FamilyInfo& info : kFamilies) {
    StrategyKind kind{info.family, Aggregation::kProbabilistic,
                      SuiteMode::kFull};
    names.push_back(kind.Name());
    if (info.allows_linear) {
      kind.aggregation = Aggregation::kLinear;
      names.push_back(kind.Name());
      kind.aggregation = Aggregation::kProbabilistic;
    }
    if (info.allows_subset) {
      kind.suite = SuiteMode::kSubset;
      names.push_back(kind.Name());
      if (info.allows_linear) {
        kind.aggregation = Aggregation::kLinear;
        names.push_back(kind.Name());
      }
    }
  }
  return names;
}

StrategyKind StrategyKind::Parse(std::string_view name) {
  const std::string wanted = Lower(name);
  for (const FamilyInfo& info : kFamilies) {
    for (Aggregation agg : {Aggregation::kProbabilistic, Aggregation::kLinear}) {
      for (SuiteMode mode : {SuiteMode::kFull, SuiteMode::kSubset}) {
        if (agg == Aggregation::kLinear && !info.allows_linear) continue;
        if (mode == SuiteMode::kSubset && !info.allows_subset) continue;
        StrategyKind kind{info.family, agg, mode};
        if (kind.Name() == wanted) return kind;
      }
    }
  }
  std::string valid;
  for (const std::string& n : ValidKindNames()) {
    if (!valid.empty()) valid += ", ";
    valid += n;
  }
  throw ConfigError("unknown strategy '" + std::string(name) +
                    "'; valid kinds: " + valid);
}

void StrategyConfig::Validate() const {
  const std::string name = kind.Name();
  auto fail = [&name](const std::string& what) {
    throw ConfigError(name + ": " + what);
  };
  if (window_hours && !(*window_hours > 0.0)) fail("window_hours must be > 0");
  if (batch_size && *batch_size < 1) fail("batch_size must be >= 1");
  if (threshold && !(*threshold > 0.0)) fail("threshold must be > 0");
  if (aging_rate && !(*aging_rate >= 0.0)) fail("aging_rate must be >= 0");
  if (high_risk_trigger &&
      !(*high_risk_trigger > 0.0 && *high_risk_trigger <= 1.0))
    fail("high_risk_trigger must be in (0, 1]");

  switch (kind.family) {
    case Family::kET:
    case Family::kTWSB:
      break;
    case Family::kTWB:
      if (!window_hours) fail("window_hours is required");
      break;
    case Family::kFSB:
      if (!batch_size) fail("batch_size is required");
      break;
    case Family::kRAPB:
      if (!aging_rate) fail("aging_rate is required");
      [[fallthrough]];
    case Family::kRASB:
      if (!threshold) fail("threshold is required");
      if (kind.aggregation == Aggregation::kProbabilistic && *threshold >= 1.0)
        fail("threshold must be in (0, 1) for probabilistic aggregation");
      break;
    case Family::kRATB:
      if (!window_hours) fail("window_hours is required");
      if (!high_risk_trigger) fail("high_risk_trigger is required");
      break;
  }
}

std::unique_ptr<Strategy> MakeStrategy(const StrategyConfig& config,
                                       const CommitStream& stream) {
  config.Validate();
  const SuiteMode mode = config.kind.suite;
  switch (config.kind.family) {
    case Family::kET:
      return std::make_unique<Exhaustive>(stream, SuiteMode::kFull);
    case Family::kTWSB:
      return std::make_unique<PerGroupCadence>(stream, config.window_hours);
    case Family::kTWB:
      return std::make_unique<TimeWindow>(stream, mode, *config.window_hours);
    case Family::kFSB:
      return std::make_unique<FixedSize>(stream, mode, *config.batch_size);
    case Family::kRASB:
      return std::make_unique<StreamRisk>(stream, mode, config.kind.aggregation,
                                          *config.threshold);
    case Family::kRAPB:
      return std::make_unique<AgedPriority>(stream, mode,
                                            config.kind.aggregation,
                                            *config.threshold,
                                            *config.aging_rate);
    case Family::kRATB:
      return std::make_unique<RiskTrigger>(stream, mode, *config.window_hours,
                                           *config.high_risk_trigger);
  }
  throw InvariantError("unhandled strategy family");
}

}  // namespace riskbatch
