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

// Discrete-event simulation of one batching strategy over a commit stream.
//
// Every flushed batch submits one job per suite group at the flush instant.
// A job becomes ready after the constant build delay and then takes the
// earliest free worker of its platform's pool. Submission order is FIFO,
// which with a constant build delay is also ready-time order.

#ifndef RISKBATCH_ENGINE_H_
#define RISKBATCH_ENGINE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "riskbatch/domain.h"
#include "riskbatch/resolver.h"
#include "riskbatch/strategies.h"

namespace riskbatch {

struct EngineConfig {
  double build_delay_minutes = 98.7;
  double tick_minutes = 5.0;
  // Worker counts indexed by Platform: Android, Windows, Linux, MacOS.
  std::array<int, 4> pool_capacity = {60, 120, 100, 250};
  std::uint64_t seed = 0;

  int capacity(Platform p) const {
    return pool_capacity[static_cast<std::size_t>(p)];
  }
  int& capacity(Platform p) { return pool_capacity[static_cast<std::size_t>(p)]; }
  Time build_delay() const { return MinutesToSeconds(build_delay_minutes); }
  Time tick() const { return MinutesToSeconds(tick_minutes); }

  // Throws ConfigError.
  void Validate() const;
};

class WorkerPool {
 public:
  struct Slot {
    Time start = 0;
    Time end = 0;
    int worker = 0;
  };

  WorkerPool(Platform platform, int capacity);

  // Runs a job on the worker that frees up first (lowest index on ties),
  // starting no earlier than `ready`.
  Slot Schedule(Time ready, Time duration);

  Platform platform() const { return platform_; }
  int capacity() const { return static_cast<int>(busy_until_.size()); }
  std::span<const Time> busy_until() const { return busy_until_; }

 private:
  using Entry = std::pair<Time, int>;

  Platform platform_;
  std::vector<Time> busy_until_;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> free_;
};

class PoolSet {
 public:
  explicit PoolSet(const EngineConfig& config);

  // Throws InvariantError for a platform without a pool.
  WorkerPool::Slot Schedule(Platform platform, Time ready, Time duration);
  const WorkerPool& pool(Platform platform) const;

 private:
  std::vector<WorkerPool> pools_;
};

enum class JobKind { kBatch, kBackfill };
enum class Outcome { kPass, kFail };

struct TestJob {
  std::size_t job_id = 0;
  JobKind kind = JobKind::kBatch;
  // Set for batch jobs; backfill jobs are identified by commit and group.
  std::optional<std::size_t> batch_id;
  CommitIndex commit = 0;  // backfill target, or the batch's newest commit
  GroupIndex group = 0;
  Time submit_time = 0;
  Time start_time = 0;
  Time end_time = 0;
  int worker = 0;
  Outcome outcome = Outcome::kPass;
};

struct Batch {
  std::size_t id = 0;
  CommitIndex first = 0;
  CommitIndex last = 0;
  Time flush_time = 0;
  Suite suite;
  std::vector<std::size_t> jobs;

  std::size_t size() const { return last - first + 1; }
};

struct BatchResult {
  std::size_t batch_id = 0;
  std::vector<std::pair<GroupIndex, Outcome>> outcomes;
  Time completion_time = 0;
  bool detected = false;
};

struct SimulationResult {
  std::vector<TestJob> jobs;
  std::vector<Batch> batches;
  std::vector<BatchResult> batch_results;
  std::vector<CulpritRecord> culprits;
  std::vector<CommitIndex> undetected;
  std::size_t batch_job_count = 0;
  std::size_t backfill_job_count = 0;
};

SimulationResult RunSimulation(const CommitStream& stream,
                               const StrategyConfig& config,
                               const EngineConfig& engine);

// One JSON object per job, in submission order.
std::string EventLogJsonl(const SimulationResult& result,
                          const CommitStream& stream);

}  // namespace riskbatch

#endif  // RISKBATCH_ENGINE_H_
