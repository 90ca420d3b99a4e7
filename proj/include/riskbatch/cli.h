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

// Command-line front end: simulate, compare, tune and generate.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 internal
// invariant violation.

#ifndef RISKBATCH_CLI_H_
#define RISKBATCH_CLI_H_

#include <cstddef>
#include <exception>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "riskbatch/config.h"
#include "riskbatch/domain.h"
#include "riskbatch/metrics.h"
#include "riskbatch/streamgen.h"
#include "riskbatch/tuner.h"

namespace riskbatch {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInvariant = 2;

struct SimulateOutput {
  std::vector<SimulationReport> reports;  // in configuration order
  std::vector<std::string> event_logs;    // filled when requested
  std::optional<std::size_t> baseline;
  double rate = 0.0;
};

// Cost rate precedence: explicit rate, then the baseline strategy's own run,
// then the cost model's baseline figures.
SimulateOutput SimulateAll(const RunConfig& config, const CommitStream& stream,
                           bool export_events);

struct TuneOutcome {
  TuneResult tuning;
  SimulationReport test_report;
};

struct TuneOutput {
  SimulationReport baseline_eval;
  SimulationReport baseline_test;
  std::vector<TuneOutcome> tuned;
  double rate = 0.0;
};

// Tunes every configured kind on the eval split against the baseline's eval
// max TTC, then replays the chosen configurations and the baseline on the
// test split. The baseline defaults to TWSB when the configuration names
// none.
TuneOutput TuneAll(const RunConfig& config, const CommitStream& stream);

// Reads GenSpec fields from a JSON object. Throws ConfigError.
GenSpec GenSpecFromJson(const nlohmann::json& j);
nlohmann::json GenSpecToJson(const GenSpec& spec);

// Exit code for an error escaping a subcommand.
int ExitCodeFor(const std::exception& e);

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace riskbatch

#endif  // RISKBATCH_CLI_H_
