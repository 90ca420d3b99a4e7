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

#include "riskbatch/resolver.h"

#include <gtest/gtest.h>

#include <vector>

#include "riskbatch/engine.h"
#include "riskbatch/errors.h"
#include "test_util.h"

namespace riskbatch {
namespace {

using testing::CommitSpec;
using testing::EngineWithCapacity;
using testing::MakeStream;
using testing::UniformCatalog;

constexpr Time kBuild = 5922;
constexpr Time kTwenty = 1200;

// Records submissions and hands back caller-chosen end times.
struct FakeScheduler {
  std::vector<BackfillJob> jobs;
  std::vector<Time> ends;

  BackfillScheduler Bind() {
    return [this](CommitIndex c, GroupIndex g, bool fails) {
      const Time end = ends.at(jobs.size());
      jobs.push_back({c, g, fails, end});
      return end;
    };
  }
};

CommitStream ThreeCommits(std::vector<std::string> c1_fails,
                          std::vector<std::string> c2_fails) {
  return MakeStream({{0, 0, {}, {}}, {60, 0, c1_fails, {}}, {120, 0, c2_fails, {}}},
                    UniformCatalog(2, 20.0));
}

TEST(GroupLedger, TracksLiveRegressors) {
  const CommitStream stream = ThreeCommits({"g0"}, {"g0", "g1"});
  GroupLedger ledger(stream);
  EXPECT_EQ(ledger.EarliestLive(0, {0, 3}), 1u);
  EXPECT_EQ(ledger.EarliestLive(1, {0, 3}), 2u);
  EXPECT_FALSE(ledger.HasLive(1, {0, 2}));
  ledger.MarkIdentified(1);
  EXPECT_EQ(ledger.EarliestLive(0, {0, 3}), 2u);
  ledger.MarkClean(1, 1);
  EXPECT_EQ(ledger.clean_upto(1), 2u);
  EXPECT_THROW(ledger.MarkClean(0, 2), InvariantError);
  EXPECT_EQ(SuspectRangeFor(ledger, 1, 2), (CommitRange{2, 3}));
  EXPECT_EQ(SuspectRangeFor(ledger, 0, 2), (CommitRange{0, 3}));
}

TEST(ResolveFailure, SingletonIsIdentifiedWithoutBackfill) {
  const CommitStream stream = ThreeCommits({"g0"}, {});
  GroupLedger ledger(stream);
  FakeScheduler fake;
  const GroupIndex failing[] = {0};
  const auto res = ResolveFailure(ledger, {1, 2}, failing, 777, fake.Bind());
  ASSERT_EQ(res.size(), 1u);
  EXPECT_EQ(res[0].culprit, 1u);
  EXPECT_EQ(res[0].identified_at, 777);
  EXPECT_TRUE(res[0].backfills.empty());
  EXPECT_TRUE(fake.jobs.empty());
}

TEST(ResolveFailure, IdentifiesOnceJobsThroughCulpritFinish) {
  const CommitStream stream = ThreeCommits({"g0"}, {});
  GroupLedger ledger(stream);
  FakeScheduler fake;
  fake.ends = {500, 400, 900};  // c0, c1, c2
  const GroupIndex failing[] = {0};
  const auto res = ResolveFailure(ledger, {0, 3}, failing, 100, fake.Bind());
  ASSERT_EQ(res.size(), 1u);
  EXPECT_EQ(res[0].culprit, 1u);
  EXPECT_EQ(res[0].identified_at, 500);  // max(end c0, end c1)
  ASSERT_EQ(fake.jobs.size(), 3u);
  EXPECT_FALSE(fake.jobs[0].fails);
  EXPECT_TRUE(fake.jobs[1].fails);
  EXPECT_TRUE(fake.jobs[2].fails);
}

TEST(ResolveFailure, GroupsResolveIndependently) {
  const CommitStream stream = ThreeCommits({"g0"}, {"g1"});
  GroupLedger ledger(stream);
  FakeScheduler fake;
  fake.ends = {10, 20, 30, 40, 50, 60};  // (c0,g0) (c0,g1) (c1,g0) ...
  const GroupIndex failing[] = {0, 1};
  const auto res = ResolveFailure(ledger, {0, 3}, failing, 0, fake.Bind());
  ASSERT_EQ(res.size(), 2u);
  EXPECT_EQ(res[0].culprit, 1u);
  EXPECT_EQ(res[0].identified_at, 30);
  EXPECT_EQ(res[1].culprit, 2u);
  EXPECT_EQ(res[1].identified_at, 60);
  EXPECT_EQ(fake.jobs.size(), 6u);
}

TEST(ResolveFailure, RejectsInconsistentInput) {
  const CommitStream stream = ThreeCommits({}, {});
  GroupLedger ledger(stream);
  FakeScheduler fake;
  const GroupIndex failing[] = {0};
  EXPECT_THROW(ResolveFailure(ledger, {1, 1}, failing, 0, fake.Bind()),
               InvariantError);
  EXPECT_THROW(ResolveFailure(ledger, {0, 3}, failing, 0, fake.Bind()),
               InvariantError);
}

TEST(Resolver, BatchWithOneRegressorBackfillsEverySuspect) {
  // Batch {c0, c1 regressor, c2}, one group, one worker.
  const CommitStream stream =
      MakeStream({{0, 0, {}, {}}, {60, 0, {"g0"}, {}}, {120, 0, {}, {}}},
                 UniformCatalog(1, 20.0));
  const SimulationResult r =
      RunSimulation(stream, testing::Fsb(3), EngineWithCapacity(1));
  const Time detected = 120 + kBuild + kTwenty;
  ASSERT_EQ(r.jobs.size(), 4u);
  EXPECT_EQ(r.jobs[0].outcome, Outcome::kFail);
  EXPECT_EQ(r.backfill_job_count, 3u);
  for (std::size_t k = 1; k < 4; ++k) {
    EXPECT_EQ(r.jobs[k].kind, JobKind::kBackfill);
    EXPECT_EQ(r.jobs[k].submit_time, detected);
    EXPECT_EQ(r.jobs[k].commit, k - 1);
  }
  EXPECT_EQ(r.jobs[1].outcome, Outcome::kPass);
  EXPECT_EQ(r.jobs[2].outcome, Outcome::kFail);
  EXPECT_EQ(r.jobs[3].outcome, Outcome::kFail);
  ASSERT_EQ(r.culprits.size(), 1u);
  EXPECT_EQ(r.culprits[0].commit_id, "c1");
  EXPECT_EQ(r.culprits[0].group_id, "g0");
  EXPECT_EQ(r.culprits[0].identified_at,
            std::max(r.jobs[1].end_time, r.jobs[2].end_time));
  EXPECT_EQ(r.culprits[0].identified_at, detected + kBuild + 2 * kTwenty);
  EXPECT_NEAR(r.culprits[0].ttc_hours,
              SecondsToHours(r.culprits[0].identified_at - 60), 1e-12);
  EXPECT_TRUE(r.undetected.empty());
}

TEST(Resolver, SingleCommitBatchIdentifiesAtDetection) {
  const CommitStream stream =
      MakeStream({{0, 0, {"g0"}, {}}}, UniformCatalog(1, 20.0));
  const SimulationResult r =
      RunSimulation(stream, testing::Kind("et"), EngineConfig{});
  ASSERT_EQ(r.culprits.size(), 1u);
  EXPECT_EQ(r.culprits[0].identified_at, kBuild + kTwenty);
  EXPECT_EQ(r.backfill_job_count, 0u);
}

TEST(Resolver, TwoRegressorsOfOneGroupAreBothFound) {
  const CommitStream stream = MakeStream(
      {{0, 0, {}, {}}, {60, 0, {"g0"}, {}}, {120, 0, {"g0"}, {}}, {180, 0, {}, {}}},
      UniformCatalog(1, 20.0));
  const SimulationResult r =
      RunSimulation(stream, testing::Fsb(4), EngineConfig{});
  ASSERT_EQ(r.culprits.size(), 2u);
  EXPECT_EQ(r.culprits[0].commit_id, "c1");
  EXPECT_EQ(r.culprits[1].commit_id, "c2");
  EXPECT_GE(r.culprits[1].identified_at, r.culprits[0].identified_at);
  EXPECT_TRUE(r.undetected.empty());
}

TEST(Resolver, RegressorsOnDifferentGroups) {
  const CommitStream stream = MakeStream(
      {{0, 0, {"g1"}, {}}, {60, 0, {}, {}}, {120, 0, {"g0"}, {}}},
      UniformCatalog(2, 20.0));
  const SimulationResult r =
      RunSimulation(stream, testing::Fsb(3), EngineConfig{});
  ASSERT_EQ(r.culprits.size(), 2u);
  std::vector<std::string> found;
  for (const CulpritRecord& c : r.culprits) found.push_back(c.commit_id + "/" + c.group_id);
  std::sort(found.begin(), found.end());
  EXPECT_EQ(found, (std::vector<std::string>{"c0/g1", "c2/g0"}));
  // Both groups backfill all three suspects.
  EXPECT_EQ(r.backfill_job_count, 6u);
}

TEST(Resolver, FailureAcrossBatchesWidensSuspectRange) {
  // fsb-s: group g0 is only selected by c2, so the regressor c0 is first
  // exercised in the second batch and every commit since is suspect.
  const CommitStream stream = MakeStream(
      {{0, 0, {"g0"}, {"g1"}}, {60, 0, {}, {"g1"}}, {120, 0, {}, {"g0"}},
       {180, 0, {}, {"g0"}}},
      UniformCatalog(2, 20.0));
  const SimulationResult r =
      RunSimulation(stream, testing::Fsb(2, "fsb-s"), EngineConfig{});
  ASSERT_EQ(r.culprits.size(), 1u);
  EXPECT_EQ(r.culprits[0].commit_id, "c0");
  std::size_t backfills = 0;
  for (const TestJob& job : r.jobs)
    if (job.kind == JobKind::kBackfill) {
      ++backfills;
      EXPECT_EQ(job.group, 0u);
    }
  EXPECT_EQ(backfills, 4u);
}

TEST(Resolver, UnselectedRegressionStaysUndetected) {
  const CommitStream stream =
      MakeStream({{0, 0, {"g1"}, {"g0"}}}, UniformCatalog(2, 20.0));
  const SimulationResult r =
      RunSimulation(stream, testing::Fsb(1, "fsb-s"), EngineConfig{});
  EXPECT_TRUE(r.culprits.empty());
  EXPECT_EQ(r.undetected, (std::vector<CommitIndex>{0}));
}

TEST(Resolver, LaterBatchesFailUntilCulpritIsIdentified) {
  const CommitStream stream = MakeStream(
      {{0, 0, {"g0"}, {}}, {0, 0, {}, {}}, {50000, 0, {}, {}}},
      UniformCatalog(1, 20.0));
  const SimulationResult r =
      RunSimulation(stream, testing::Kind("et"), EngineConfig{});
  ASSERT_EQ(r.batch_results.size(), 3u);
  EXPECT_TRUE(r.batch_results[0].detected);
  EXPECT_TRUE(r.batch_results[1].detected);   // completes before the fix
  EXPECT_FALSE(r.batch_results[2].detected);  // backed out by then
  ASSERT_EQ(r.culprits.size(), 1u);
  EXPECT_EQ(r.culprits[0].commit_id, "c0");
}

}  // namespace
}  // namespace riskbatch
