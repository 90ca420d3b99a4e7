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

#include "riskbatch/tuner.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "riskbatch/errors.h"
#include "riskbatch/streamgen.h"
#include "test_util.h"

namespace riskbatch {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CommitStream SmallStream(std::uint64_t seed, std::size_t n = 300) {
  GenSpec spec;
  spec.n_commits = n;
  spec.positive_rate = 0.03;
  spec.groups_per_platform = {2, 2, 2, 2};
  spec.seed = seed;
  return Generate(spec);
}

std::vector<Objectives> ObjectivesOf(std::span<const Individual> points) {
  std::vector<Objectives> out;
  for (const Individual& p : points) out.push_back(p.objectives);
  return out;
}

TEST(Dominates, IsStrictPartialOrder) {
  EXPECT_TRUE(Dominates({10, 5}, {12, 5}));
  EXPECT_TRUE(Dominates({10, 4}, {10, 5}));
  EXPECT_FALSE(Dominates({10, 5}, {10, 5}));
  EXPECT_FALSE(Dominates({10, 5}, {12, 4}));
}

TEST(NondominatedSort, HandExample) {
  const Objectives points[] = {{10, 5}, {12, 4}, {15, 6}};
  const auto fronts = NondominatedSort(points);
  ASSERT_EQ(fronts.size(), 2u);
  EXPECT_EQ(fronts[0], (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(fronts[1], (std::vector<std::size_t>{2}));
}

TEST(NondominatedSort, IdenticalAndSingletonPoints) {
  const Objectives same[] = {{3, 3}, {3, 3}, {3, 3}};
  const auto fronts = NondominatedSort(same);
  ASSERT_EQ(fronts.size(), 1u);
  EXPECT_EQ(fronts[0].size(), 3u);
  const Objectives one[] = {{1, 2}};
  EXPECT_EQ(NondominatedSort(one), (std::vector<std::vector<std::size_t>>{{0}}));
}

TEST(NondominatedSort, ViolationOutranksObjectives) {
  const Objectives points[] = {{1, 1}, {5, 5}};
  const double violation[] = {2, 0};
  const auto fronts = NondominatedSort(points, violation);
  ASSERT_EQ(fronts.size(), 2u);
  EXPECT_EQ(fronts[0], (std::vector<std::size_t>{1}));
}

TEST(NondominatedSort, FrontsPartitionAndRespectDomination) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> u(0, 20);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Objectives> points;
    for (int i = 0; i < 30; ++i)
      points.push_back({static_cast<double>(u(rng)), static_cast<double>(u(rng))});
    const auto fronts = NondominatedSort(points);
    std::vector<std::size_t> rank(points.size(), 99);
    std::size_t total = 0;
    for (std::size_t r = 0; r < fronts.size(); ++r)
      for (std::size_t i : fronts[r]) {
        rank[i] = r;
        ++total;
      }
    EXPECT_EQ(total, points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = 0; j < points.size(); ++j)
        if (Dominates(points[i], points[j])) EXPECT_LT(rank[i], rank[j]);
  }
}

TEST(CrowdingDistance, BoundaryAndInterior) {
  const Objectives two[] = {{1, 2}, {2, 1}};
  for (double d : CrowdingDistance(two)) EXPECT_EQ(d, kInf);
  const Objectives three[] = {{10, 6}, {12, 5}, {14, 4}};
  const auto d = CrowdingDistance(three);
  EXPECT_EQ(d[0], kInf);
  EXPECT_EQ(d[2], kInf);
  EXPECT_DOUBLE_EQ(d[1], 2.0);
  const Objectives flat[] = {{4, 4}, {4, 4}, {4, 4}, {4, 4}};
  const auto f = CrowdingDistance(flat);
  EXPECT_EQ(std::count(f.begin(), f.end(), 0.0), 2);
}

TEST(TuneBudget, FiftyPerParameter) {
  const TuneBudget one = TuneBudget::ForDimension(1, 0);
  EXPECT_EQ(one.evaluations, 50u);
  EXPECT_EQ(one.population, 20u);
  const TuneBudget two = TuneBudget::ForDimension(2, 0);
  EXPECT_EQ(two.evaluations, 100u);
  EXPECT_EQ(two.population, 40u);
  TuneBudget bad{10, 20, 0};
  EXPECT_THROW(bad.Validate(), ConfigError);
}

TEST(ParamSpace, DefaultsValidationAndApply) {
  EXPECT_THROW(DefaultSpace(StrategyKind::Parse("et")), ConfigError);
  EXPECT_THROW(DefaultSpace(StrategyKind::Parse("twsb")), ConfigError);
  const ParamSpace rapb = DefaultSpace(StrategyKind::Parse("rapb-la"));
  EXPECT_EQ(rapb.dimension(), 2u);
  const ParamSpace fsb = DefaultSpace(StrategyKind::Parse("fsb"));
  ASSERT_EQ(fsb.dimension(), 1u);
  EXPECT_TRUE(fsb.params[0].integer);
  EXPECT_EQ(fsb.Normalize({7.6}), (std::vector<double>{8.0}));
  EXPECT_EQ(fsb.Normalize({99.0}), (std::vector<double>{50.0}));
  const double genes[] = {12.0};
  EXPECT_EQ(*fsb.Apply(StrategyKind::Parse("fsb"), genes).batch_size, 12);
  ParamSpace bad{{{"threshold", 0.5, 0.5, false}}};
  EXPECT_THROW(bad.Validate(), ConfigError);
  ParamSpace unknown{{{"colour", 0, 1, false}}};
  EXPECT_THROW(unknown.Validate(), ConfigError);
  ParamSpace dup{{{"threshold", 0, 1, false}, {"threshold", 0, 1, false}}};
  EXPECT_THROW(dup.Validate(), ConfigError);
}

TEST(SelectChosen, BoundThenFallback) {
  std::vector<Individual> pts(4);
  pts[0].objectives = {100, 9};
  pts[1].objectives = {80, 12};
  pts[2].objectives = {120, 3};
  pts[3].objectives = {50, 1};
  pts[3].undetected = 2;  // infeasible
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i].evaluation = i;
  EXPECT_EQ(SelectChosen(pts, 10.0).evaluation, 0u);
  EXPECT_EQ(SelectChosen(pts, 2.0).evaluation, 2u);   // none within: fastest
  EXPECT_EQ(SelectChosen(pts, std::nullopt).evaluation, 1u);
  pts.resize(1);
  pts[0].undetected = 1;
  EXPECT_THROW(SelectChosen(pts, 1.0), ValidationError);
}

TEST(StrategyConfigJson, RoundTripsAndRejectsUnknownKeys) {
  const StrategyConfig c = testing::Rapb(0.7, 0.25, "rapb-la-s");
  EXPECT_EQ(StrategyConfigFromJson(StrategyConfigToJson(c)), c);
  nlohmann::json j = StrategyConfigToJson(c);
  j["windw_hours"] = 3;
  EXPECT_THROW(StrategyConfigFromJson(j), ConfigError);
  EXPECT_THROW(StrategyConfigFromJson({{"kind", "rasb"}}), ConfigError);
}

TEST(Tune, RapbUsesExactlyOneHundredEvaluations) {
  const CommitStream stream = SmallStream(4);
  const StrategyKind kind = StrategyKind::Parse("rapb");
  std::size_t calls = 0;
  TuneOptions options;
  options.on_evaluation = [&calls](const Individual&) { ++calls; };
  const TuneResult r = Tune(kind, DefaultSpace(kind), stream, EngineConfig{},
                            TuneBudget::ForDimension(2, 9), options);
  EXPECT_EQ(r.evaluated.size(), 100u);
  EXPECT_EQ(calls, 100u);
  std::set<std::vector<double>> distinct;
  for (const Individual& p : r.evaluated) distinct.insert(p.genes);
  EXPECT_EQ(distinct.size(), 100u);
  // Front is mutually non-dominated and nothing evaluated dominates it.
  for (const Individual& a : r.front)
    for (const Individual& b : r.evaluated)
      EXPECT_FALSE(Dominates(b.objectives, a.objectives));
}

TEST(Tune, IsDeterministicAcrossThreadCounts) {
  const CommitStream stream = SmallStream(5);
  const StrategyKind kind = StrategyKind::Parse("ratb");
  const TuneBudget budget = TuneBudget::ForDimension(2, 77);
  TuneOptions serial;
  TuneOptions parallel;
  parallel.threads = 4;
  const TuneResult a = Tune(kind, DefaultSpace(kind), stream, EngineConfig{}, budget, serial);
  const TuneResult b = Tune(kind, DefaultSpace(kind), stream, EngineConfig{}, budget, parallel);
  EXPECT_EQ(TuneResultToJson(a).dump(), TuneResultToJson(b).dump());
  const TuneResult c = Tune(kind, DefaultSpace(kind), stream, EngineConfig{},
                            TuneBudget::ForDimension(2, 78), serial);
  EXPECT_NE(TuneResultToJson(a).dump(), TuneResultToJson(c).dump());
}

TEST(Tune, FixedSizeFrontMatchesBruteForce) {
  const CommitStream stream = SmallStream(6);
  const StrategyKind kind = StrategyKind::Parse("fsb");
  // Oracle: simulate every size directly and keep the non-dominated ones.
  std::vector<std::pair<int, Objectives>> sweep;
  for (int size = 1; size <= 50; ++size) {
    const SimulationResult sim =
        RunSimulation(stream, testing::Fsb(size), EngineConfig{});
    const SimulationReport rep = Summarize("fsb", sim, stream, 1.0);
    sweep.push_back({size, {static_cast<double>(rep.total_tests),
                            rep.max_ttc_hours.value_or(0.0)}});
  }
  std::set<int> expected;
  for (const auto& [size, obj] : sweep) {
    bool dominated = false;
    for (const auto& other : sweep) dominated |= Dominates(other.second, obj);
    if (!dominated) expected.insert(size);
  }
  const TuneResult r = Tune(kind, DefaultSpace(kind), stream, EngineConfig{},
                            TuneBudget::ForDimension(1, 3));
  std::set<int> got;
  for (const Individual& p : r.front) got.insert(static_cast<int>(p.genes[0]));
  EXPECT_EQ(got, expected);
  EXPECT_TRUE(got.count(1));
  EXPECT_EQ(r.evaluated.size(), 50u);
}

TEST(Replay, OnEvalStreamReproducesObjectives) {
  const CommitStream stream = SmallStream(7);
  const StrategyKind kind = StrategyKind::Parse("twb");
  const TuneResult r = Tune(kind, DefaultSpace(kind), stream, EngineConfig{},
                            TuneBudget::ForDimension(1, 1));
  const SimulationReport rep = Replay(r.chosen_config, stream, EngineConfig{}, 2.0);
  EXPECT_EQ(static_cast<double>(rep.total_tests), r.chosen.objectives.total_tests);
  EXPECT_EQ(rep.max_ttc_hours.value_or(0.0), r.chosen.objectives.max_ttc_hours);
}

TEST(Replay, ExhaustiveCountsEveryGroup) {
  std::vector<testing::CommitSpec> specs;
  for (int i = 0; i < 120; ++i) specs.push_back({i * 900, 0.1, {}, {}});
  const CommitStream stream =
      testing::MakeStream(specs, testing::UniformCatalog(7, 20.0));
  const SimulationReport rep =
      Replay(testing::Kind("et"), stream, EngineConfig{}, 1.0);
  EXPECT_EQ(rep.total_tests, 120u * 7u);
}

}  // namespace
}  // namespace riskbatch
