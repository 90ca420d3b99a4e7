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

// Batching policies. A strategy consumes commits in arrival order and decides
// when the pending batch is flushed and which signature-groups it runs.
//
// The simulation loop consults a strategy at three kinds of points: commit
// arrivals (OnCommit), clock wake-ups (OnTick, both the periodic tick and the
// exact instant reported by NextDeadline), and end of stream (FlushResidual).

#ifndef RISKBATCH_STRATEGIES_H_
#define RISKBATCH_STRATEGIES_H_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskbatch/domain.h"

namespace riskbatch {

enum class Family { kET, kTWSB, kTWB, kFSB, kRASB, kRAPB, kRATB };
enum class Aggregation { kProbabilistic, kLinear };
enum class SuiteMode { kFull, kSubset };

struct StrategyKind {
  Family family = Family::kET;
  Aggregation aggregation = Aggregation::kProbabilistic;
  SuiteMode suite = SuiteMode::kFull;

  // Canonical lower-case name, e.g. "rapb-la-s".
  std::string Name() const;
  // Throws ConfigError listing the valid names.
  static StrategyKind Parse(std::string_view name);

  bool operator==(const StrategyKind&) const = default;
};

std::vector<std::string> ValidKindNames();

struct StrategyConfig {
  StrategyKind kind;
  std::optional<double> window_hours;       // TWB, RATB, TWSB fallback cadence
  std::optional<int> batch_size;            // FSB
  std::optional<double> threshold;          // RASB, RAPB (probability or budget)
  std::optional<double> aging_rate;         // RAPB, per hour
  std::optional<double> high_risk_trigger;  // RATB

  // Checks that every parameter `kind` needs is present and in range.
  // Throws ConfigError.
  void Validate() const;

  bool operator==(const StrategyConfig&) const = default;
};

struct Suite {
  SuiteMode mode = SuiteMode::kFull;
  // Ascending group indices; every catalog group for a full suite.
  std::vector<GroupIndex> groups;
};

// One flushed batch: the contiguous commits [first, last] and its suite.
struct BatchDecision {
  CommitIndex first = 0;
  CommitIndex last = 0;
  Suite suite;

  std::size_t size() const { return last - first + 1; }
};

class Strategy {
 public:
  virtual ~Strategy() = default;

  // Appends commit `index` (arriving at `now`) and applies the flush rule.
  // Throws InvariantError when time runs backwards.
  virtual std::vector<BatchDecision> OnCommit(CommitIndex index, Time now) = 0;
  // Re-evaluates the time-dependent flush conditions.
  virtual std::vector<BatchDecision> OnTick(Time now) = 0;
  // Flushes whatever is still pending once the stream is exhausted.
  virtual std::vector<BatchDecision> FlushResidual(Time stream_end) = 0;
  // Earliest future instant at which OnTick would flush if no further commit
  // arrived, when the strategy has such an instant.
  virtual std::optional<Time> NextDeadline() const = 0;
};

// The stream must outlive the returned strategy.
std::unique_ptr<Strategy> MakeStrategy(const StrategyConfig& config,
                                       const CommitStream& stream);

}  // namespace riskbatch

#endif  // RISKBATCH_STRATEGIES_H_
