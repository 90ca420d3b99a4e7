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

// Run configuration: one JSON document naming the inputs, engine settings,
// strategies, cost model and tuning options. Relative paths resolve against
// the directory holding the document.
//
//   {
//     "stream": "stream.jsonl", "catalog": "catalog.json", "out": "out",
//     "seed": 7, "baseline": "twsb",
//     "engine": {"build_delay_minutes": 98.7, "tick_minutes": 5,
//                "pools": {"android": 60, "windows": 120, "linux": 100,
//                          "macos": 250}},
//     "split": {"train": 0.65, "eval": 0.10, "test": 0.25},
//     "cost": {"baseline_cost": 390000, "baseline_infra_hours": 112108,
//              "rate": null, "currency": "USD"},
//     "threads": 1,
//     "strategies": [{"name": "twsb", "kind": "twsb"},
//                    {"kind": "rapb-la", "threshold": 1.2, "aging_rate": 0.1}],
//     "tune": {"strategies": ["twb", "rapb-la"], "evaluations": null,
//              "bounds": {"twb": [{"name": "window_hours", "lo": 0.25,
//                                  "hi": 24}]}}
//   }

#ifndef RISKBATCH_CONFIG_H_
#define RISKBATCH_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "riskbatch/domain.h"
#include "riskbatch/engine.h"
#include "riskbatch/metrics.h"
#include "riskbatch/strategies.h"
#include "riskbatch/tuner.h"

namespace riskbatch {

struct NamedStrategy {
  std::string label;  // defaults to the kind name
  StrategyConfig config;
};

struct CostSettings {
  CostModel model;
  // Overrides every other way of fixing the rate.
  std::optional<double> rate;
  std::string currency = "USD";
};

struct TuneSettings {
  std::vector<StrategyKind> strategies;
  // Defaults to 50 per parameter.
  std::optional<std::size_t> evaluations;
  std::map<std::string, ParamSpace> bounds;  // keyed by kind name

  ParamSpace SpaceFor(StrategyKind kind) const;
};

struct RunConfig {
  std::filesystem::path stream;
  std::filesystem::path catalog;
  std::filesystem::path out = "out";
  std::uint64_t seed = 0;
  std::optional<std::string> baseline;
  EngineConfig engine;
  SplitSpec split;
  CostSettings cost;
  std::size_t threads = 1;
  std::vector<NamedStrategy> strategies;
  TuneSettings tune;

  const NamedStrategy* FindStrategy(std::string_view label) const;
  // Throws ConfigError.
  void Validate() const;
};

// Throws ConfigError with the offending key.
RunConfig ParseRunConfig(std::string_view text,
                         const std::filesystem::path& base_dir,
                         std::string_view source = "<config>");
RunConfig LoadRunConfig(const std::filesystem::path& path);
nlohmann::json RunConfigToJson(const RunConfig& config);

// Independent 64-bit seed for `component`, derived from the top-level seed.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t component);

}  // namespace riskbatch

#endif  // RISKBATCH_CONFIG_H_
