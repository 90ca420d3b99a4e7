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

// Culprit isolation by backfilling, plus per-group bookkeeping of regressions
// that have landed but not yet been identified.
//
// Outcome model: a regression persists in every later tree until its culprit
// is identified, at which point it is treated as backed out on all groups.
// A run of group g on a tree whose newest commit is `tip` therefore fails iff
// some unidentified regressor of g has index <= tip.

#ifndef RISKBATCH_RESOLVER_H_
#define RISKBATCH_RESOLVER_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskbatch/domain.h"

namespace riskbatch {

// Half-open commit index range [begin, end).
struct CommitRange {
  CommitIndex begin = 0;
  CommitIndex end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return end <= begin; }
  bool operator==(const CommitRange&) const = default;
};

struct CulpritRecord {
  std::string commit_id;
  std::string group_id;
  CommitIndex commit = 0;
  GroupIndex group = 0;
  Time land_time = 0;
  Time identified_at = 0;
  double ttc_hours = 0.0;
};

class GroupLedger {
 public:
  explicit GroupLedger(const CommitStream& stream);

  // First commit not yet confirmed clean for g; suspect ranges start here.
  CommitIndex clean_upto(GroupIndex g) const { return clean_upto_[g]; }
  // Records that commits [0, through] are clean for g. Throws InvariantError
  // if a live regressor of g remains in that prefix.
  void MarkClean(GroupIndex g, CommitIndex through);

  bool IsIdentified(CommitIndex c) const { return identified_[c] != 0; }
  void MarkIdentified(CommitIndex c) { identified_[c] = 1; }

  std::optional<CommitIndex> EarliestLive(GroupIndex g,
                                          CommitRange range) const;
  bool HasLive(GroupIndex g, CommitRange range) const {
    return EarliestLive(g, range).has_value();
  }
  std::span<const CommitIndex> regressors(GroupIndex g) const {
    return regressors_[g];
  }

 private:
  std::vector<CommitIndex> clean_upto_;
  std::vector<std::vector<CommitIndex>> regressors_;
  std::vector<char> identified_;
};

// Commits after g's last clean run up to and including `tip`.
CommitRange SuspectRangeFor(const GroupLedger& ledger, GroupIndex g,
                            CommitIndex tip);

struct BackfillJob {
  CommitIndex commit = 0;
  GroupIndex group = 0;
  bool fails = false;
  Time end_time = 0;
};

// Submits one backfill run at the current instant and returns its end time.
using BackfillScheduler =
    std::function<Time(CommitIndex commit, GroupIndex group, bool fails)>;

struct Resolution {
  GroupIndex group = 0;
  CommitRange suspects;
  CommitIndex culprit = 0;
  Time identified_at = 0;
  std::vector<BackfillJob> backfills;
};

// Plans culprit identification for the groups that failed on `suspects`.
// A single suspect is identified at `detected_at` without backfills.
// Otherwise every (suspect, group) pair is backfilled concurrently, commit by
// commit, and each group's culprit is its earliest failing commit, known once
// every backfill up to and including it has finished.
// Throws InvariantError on an empty range or a group with no live regressor.
std::vector<Resolution> ResolveFailure(const GroupLedger& ledger,
                                       CommitRange suspects,
                                       std::span<const GroupIndex> failing_groups,
                                       Time detected_at,
                                       const BackfillScheduler& schedule);

// Owns the ledger and the open detection episodes of one simulation run.
class Resolver {
 public:
  struct PendingIdentification {
    std::size_t episode = 0;
    Time at = 0;
  };

  explicit Resolver(const CommitStream& stream);

  // Outcome of a batch-level run of g on the tree ending at `tip`.
  bool RunFails(GroupIndex g, CommitIndex tip) const;

  // Records the outcomes of a completed batch (one run per group in
  // `groups`, all on the tree ending at `tip`) and opens episodes for new
  // failures. `fails` receives one outcome per group.
  std::vector<PendingIdentification> ObserveBatch(
      std::span<const GroupIndex> groups, CommitIndex tip, Time completed_at,
      const BackfillScheduler& schedule, std::vector<bool>& fails);

  // Fires an episode's identification. May open a follow-up episode when
  // further regressors of the same group are still live in its range.
  std::vector<PendingIdentification> Identify(std::size_t episode, Time now,
                                              const BackfillScheduler& schedule);

  const GroupLedger& ledger() const { return ledger_; }
  const std::vector<CulpritRecord>& culprits() const { return culprits_; }
  // Regressors without a culprit record, ascending.
  std::vector<CommitIndex> Undetected() const;
  bool HasOpenEpisodes() const;

 private:
  struct Episode {
    GroupIndex group = 0;
    CommitRange suspects;
    CommitIndex culprit = 0;
    CommitIndex tip = 0;  // newest commit of any failing run attributed here
    std::optional<CommitIndex> clean_tip;
    bool open = true;
  };

  PendingIdentification Open(const Resolution& resolution);

  const CommitStream& stream_;
  GroupLedger ledger_;
  std::vector<Episode> episodes_;
  std::vector<std::optional<std::size_t>> open_episode_;
  std::vector<CulpritRecord> culprits_;
};

}  // namespace riskbatch

#endif  // RISKBATCH_RESOLVER_H_
