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

#include "riskbatch/engine.h"

#include <algorithm>
#include <memory>

#include "json.hpp"
#include "riskbatch/errors.h"

namespace riskbatch {

void EngineConfig::Validate() const {
  if (!(build_delay_minutes >= 0.0))
    throw ConfigError("build_delay_minutes must be non-negative");
  if (!(tick_minutes > 0.0) || tick() <= 0)
    throw ConfigError("tick_minutes must be positive");
  for (Platform p : kAllPlatforms)
    if (capacity(p) <= 0)
      throw ConfigError("pool capacity for " + std::string(PlatformName(p)) +
                        " must be positive");
}

WorkerPool::WorkerPool(Platform platform, int capacity)
    : platform_(platform), busy_until_(static_cast<std::size_t>(capacity), 0) {
  if (capacity <= 0) throw ConfigError("worker pool capacity must be positive");
  for (int w = 0; w < capacity; ++w) free_.push({0, w});
}

WorkerPool::Slot WorkerPool::Schedule(Time ready, Time duration) {
  auto [free_at, worker] = free_.top();
  free_.pop();
  Slot slot{std::max(ready, free_at), 0, worker};
  slot.end = slot.start + duration;
  busy_until_[static_cast<std::size_t>(worker)] = slot.end;
  free_.push({slot.end, worker});
  return slot;
}

PoolSet::PoolSet(const EngineConfig& config) {
  for (Platform p : kAllPlatforms) pools_.emplace_back(p, config.capacity(p));
}

WorkerPool::Slot PoolSet::Schedule(Platform platform, Time ready,
                                   Time duration) {
  for (WorkerPool& pool : pools_)
    if (pool.platform() == platform) return pool.Schedule(ready, duration);
  throw InvariantError("no worker pool for platform " +
                       std::string(PlatformName(platform)));
}

const WorkerPool& PoolSet::pool(Platform platform) const {
  for (const WorkerPool& pool : pools_)
    if (pool.platform() == platform) return pool;
  throw InvariantError("no worker pool for platform " +
                       std::string(PlatformName(platform)));
}

namespace {

// Same-instant events are processed in this order.
enum class EventType : int {
  kArrival = 0,
  kWake = 1,
  kResidual = 2,
  kBatchComplete = 3,
  kIdentify = 4,
};

struct Event {
  Time time;
  EventType type;
  std::uint64_t seq;
  std::size_t payload;
  bool periodic = false;

  bool operator>(const Event& o) const {
    if (time != o.time) return time > o.time;
    if (type != o.type) return type > o.type;
    return seq > o.seq;
  }
};

class Simulation {
 public:
  Simulation(const CommitStream& stream, const StrategyConfig& config,
             const EngineConfig& engine)
      : stream_(stream),
        engine_(engine),
        build_delay_(engine.build_delay()),
        tick_(engine.tick()),
        pools_(engine),
        resolver_(stream),
        strategy_(MakeStrategy(config, stream)) {}

  SimulationResult Run() {
    if (stream_.empty()) return std::move(result_);
    const Time end = stream_.stream_end();
    for (CommitIndex i = 0; i < stream_.size(); ++i)
      Push(stream_[i].land_time, EventType::kArrival, i);
    const Time first = stream_[0].land_time;
    const Time first_tick = ((first + tick_ - 1) / tick_) * tick_;
    if (first_tick <= end) Push(first_tick, EventType::kWake, 0, true);
    Push(end, EventType::kResidual, 0);

    while (!events_.empty()) {
      const Event e = events_.top();
      events_.pop();
      now_ = e.time;
      switch (e.type) {
        case EventType::kArrival:
          Apply(strategy_->OnCommit(e.payload, now_));
          ScheduleDeadline(e.type);
          break;
        case EventType::kWake:
          if (e.periodic && now_ + tick_ <= end)
            Push(now_ + tick_, EventType::kWake, 0, true);
          if (!e.periodic && pending_wake_ == now_) pending_wake_.reset();
          if (residual_done_) break;
          Apply(strategy_->OnTick(now_));
          ScheduleDeadline(e.type);
          break;
        case EventType::kResidual:
          Apply(strategy_->FlushResidual(now_));
          residual_done_ = true;
          break;
        case EventType::kBatchComplete:
          CompleteBatch(e.payload);
          break;
        case EventType::kIdentify:
          for (const auto& p : resolver_.Identify(e.payload, now_, Backfill()))
            Push(p.at, EventType::kIdentify, p.episode);
          break;
      }
    }
    if (resolver_.HasOpenEpisodes())
      throw InvariantError("simulation drained with open detection episodes");
    result_.culprits = resolver_.culprits();
    result_.undetected = resolver_.Undetected();
    return std::move(result_);
  }

 private:
  void Push(Time t, EventType type, std::size_t payload, bool periodic = false) {
    events_.push(Event{t, type, seq_++, payload, periodic});
  }

  void ScheduleDeadline(EventType cause) {
    const std::optional<Time> d = strategy_->NextDeadline();
    if (!d || *d > stream_.stream_end()) return;
    if (*d < now_ || (*d == now_ && cause != EventType::kArrival)) return;
    if (pending_wake_ == *d) return;
    pending_wake_ = *d;
    Push(*d, EventType::kWake, 0);
  }

  void Apply(const std::vector<BatchDecision>& decisions) {
    for (const BatchDecision& d : decisions) Submit(d);
  }

  std::size_t AddJob(JobKind kind, std::optional<std::size_t> batch,
                     CommitIndex commit, GroupIndex g, Outcome outcome) {
    const SignatureGroup& group = stream_.group(g);
    const WorkerPool::Slot slot = pools_.Schedule(
        group.platform, now_ + build_delay_, group.DurationSeconds());
    TestJob job;
    job.job_id = result_.jobs.size();
    job.kind = kind;
    job.batch_id = batch;
    job.commit = commit;
    job.group = g;
    job.submit_time = now_;
    job.start_time = slot.start;
    job.end_time = slot.end;
    job.worker = slot.worker;
    job.outcome = outcome;
    result_.jobs.push_back(job);
    if (kind == JobKind::kBatch) {
      ++result_.batch_job_count;
    } else {
      ++result_.backfill_job_count;
    }
    return job.job_id;
  }

  void Submit(const BatchDecision& d) {
    Batch batch;
    batch.id = result_.batches.size();
    batch.first = d.first;
    batch.last = d.last;
    batch.flush_time = now_;
    batch.suite = d.suite;
    Time completion = now_;
    for (GroupIndex g : d.suite.groups) {
      const std::size_t job = AddJob(JobKind::kBatch, batch.id, d.last, g,
                                     Outcome::kPass);
      batch.jobs.push_back(job);
      completion = std::max(completion, result_.jobs[job].end_time);
    }
    BatchResult br;
    br.batch_id = batch.id;
    br.completion_time = completion;
    result_.batch_results.push_back(br);
    if (!batch.jobs.empty())
      Push(completion, EventType::kBatchComplete, batch.id);
    result_.batches.push_back(std::move(batch));
  }

  BackfillScheduler Backfill() {
    return [this](CommitIndex commit, GroupIndex g, bool fails) {
      const std::size_t job =
          AddJob(JobKind::kBackfill, std::nullopt, commit, g,
                 fails ? Outcome::kFail : Outcome::kPass);
      return result_.jobs[job].end_time;
    };
  }

  void CompleteBatch(std::size_t id) {
    const Batch& batch = result_.batches[id];
    std::vector<bool> fails;
    const std::vector<GroupIndex> groups = batch.suite.groups;
    const std::vector<std::size_t> jobs = batch.jobs;
    const CommitIndex tip = batch.last;
    auto pending = resolver_.ObserveBatch(groups, tip, now_, Backfill(), fails);
    BatchResult& br = result_.batch_results[id];
    for (std::size_t k = 0; k < groups.size(); ++k) {
      const Outcome o = fails[k] ? Outcome::kFail : Outcome::kPass;
      result_.jobs[jobs[k]].outcome = o;
      br.outcomes.emplace_back(groups[k], o);
      br.detected = br.detected || fails[k];
    }
    for (const auto& p : pending) Push(p.at, EventType::kIdentify, p.episode);
  }

  const CommitStream& stream_;
  const EngineConfig& engine_;
  Time build_delay_;
  Time tick_;
  PoolSet pools_;
  Resolver resolver_;
  std::unique_ptr<Strategy> strategy_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t seq_ = 0;
  Time now_ = 0;
  std::optional<Time> pending_wake_;
  bool residual_done_ = false;
  SimulationResult result_;
};

}  // namespace

SimulationResult RunSimulation(const CommitStream& stream,
                               const StrategyConfig& config,
                               const EngineConfig& engine) {
  engine.Validate();
  return Simulation(stream, config, engine).Run();
}

std::string EventLogJsonl(const SimulationResult& result,
                          const CommitStream& stream) {
  std::string out;
  for (const TestJob& job : result.jobs) {
    nlohmann::json j;
    j["job_id"] = job.job_id;
    j["kind"] = job.kind == JobKind::kBatch ? "batch" : "backfill";
    if (job.batch_id) {
      j["batch_id"] = *job.batch_id;
    } else {
      j["batch_id"] = nullptr;
    }
    j["commit"] = stream[job.commit].id;
    j["group"] = stream.group(job.group).id;
    j["platform"] = std::string(PlatformName(stream.group(job.group).platform));
    j["submit_time"] = job.submit_time;
    j["start_time"] = job.start_time;
    j["end_time"] = job.end_time;
    j["worker"] = job.worker;
    j["outcome"] = job.outcome == Outcome::kFail ? "fail" : "pass";
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace riskbatch
