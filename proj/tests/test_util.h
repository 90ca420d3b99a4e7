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

// Small builders shared by the unit and acceptance tests.

#ifndef RISKBATCH_TESTS_TEST_UTIL_H_
#define RISKBATCH_TESTS_TEST_UTIL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "riskbatch/domain.h"
#include "riskbatch/engine.h"
#include "riskbatch/strategies.h"

namespace riskbatch::testing {

// Groups "g0".."g{n-1}" on one platform with a common duration.
std::vector<SignatureGroup> UniformCatalog(std::size_t n, double duration_min,
                                           Platform platform = Platform::kLinux);

struct CommitSpec {
  Time land_time = 0;
  double risk = 0.0;
  std::vector<std::string> failing;
  std::vector<std::string> selected;
};

// Ids "c0".."c{n-1}"; label follows `failing`.
CommitStream MakeStream(const std::vector<CommitSpec>& commits,
                        std::vector<SignatureGroup> catalog);

// Every pool has `capacity` workers.
EngineConfig EngineWithCapacity(int capacity, double build_delay_minutes = 98.7,
                                double tick_minutes = 5.0);

StrategyConfig Kind(const std::string& name);
StrategyConfig Twb(double window_hours, const std::string& name = "twb");
StrategyConfig Fsb(int size, const std::string& name = "fsb");
StrategyConfig Rasb(double threshold, const std::string& name = "rasb");
StrategyConfig Rapb(double threshold, double aging_rate,
                    const std::string& name = "rapb");
StrategyConfig Ratb(double window_hours, double trigger,
                    const std::string& name = "ratb");

// Fresh empty directory under the system temp dir.
std::filesystem::path TempDir(const std::string& tag);

std::string ReadFile(const std::filesystem::path& path);

}  // namespace riskbatch::testing

#endif  // RISKBATCH_TESTS_TEST_UTIL_H_
