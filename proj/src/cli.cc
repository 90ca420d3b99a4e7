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

#include "riskbatch/cli.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "riskbatch/engine.h"
#include "riskbatch/errors.h"

namespace riskbatch {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string Format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string Hours(const std::optional<double>& h) {
  return h ? Format("%.3f", *h) + "h" : std::string("n/a");
}

void WriteFile(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("failed writing " + path.string());
}

json ReadJsonFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// Label safe for use in a file name.
std::string FileStem(std::string_view label) {
  std::string out;
  for (char c : label) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
                    c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out;
}

// Runs fn(i) for i in [0, n) on up to `threads` threads; rethrows the first
// failure by index.
template <typename Fn>
void ParallelFor(std::size_t n, std::size_t threads, Fn fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void Rescale(SimulationReport& r, double rate) { r.cost = r.infra_usage_hours * rate; }

std::string ReportLine(const SimulationReport& r, const std::string& currency) {
  std::string line = r.strategy + ": tests=" + std::to_string(r.total_tests) +
                     " (batch " + std::to_string(r.batch_tests) + ", backfill " +
                     std::to_string(r.backfill_tests) + ")" +
                     " mft=" + Format("%.3f", r.mean_feedback_hours) + "h" +
                     " mean_ttc=" + Hours(r.mean_ttc_hours) +
                     " max_ttc=" + Hours(r.max_ttc_hours) +
                     " infra=" + Format("%.1f", r.infra_usage_hours) + "h" +
                     " cost=" + Format("%.2f", r.cost) + " " + currency;
  if (r.cost_savings_pct)
    line += " savings=" + Format("%.2f", *r.cost_savings_pct) + "%";
  line += " undetected=" + std::to_string(r.undetected_regressors);
  if (r.untested_commits > 0)
    line += " untested_commits=" + std::to_string(r.untested_commits);
  return line;
}

void PrintExtrapolation(std::ostream& out, const SimulationReport& r,
                        const SimulationReport& baseline,
                        const std::string& currency) {
  const double delta = baseline.cost - r.cost;
  out << "  " << r.strategy << " vs " << baseline.strategy
      << ": annualized savings " << Format("%.2f", 4.0 * delta) << " "
      << currency
      << " (extrapolation: 4x the window's delta, treating the input as one "
         "quarter)\n";
}

CommitStream LoadInputs(const RunConfig& config) {
  if (config.stream.empty()) throw ConfigError("no stream path configured");
  if (config.catalog.empty()) throw ConfigError("no catalog path configured");
  if (!fs::exists(config.stream))
    throw ConfigError("stream file not found: " + config.stream.string());
  if (!fs::exists(config.catalog))
    throw ConfigError("catalog file not found: " + config.catalog.string());
  return LoadStream(config.stream, config.catalog);
}

struct CommonFlags {
  std::string config;
  std::string stream;
  std::string catalog;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string baseline;
};

void AddCommon(CLI::App* cmd, CommonFlags& f, bool with_baseline) {
  cmd->add_option("--config", f.config, "Run configuration (JSON)");
  cmd->add_option("--stream", f.stream, "Commit stream (JSON Lines)");
  cmd->add_option("--catalog", f.catalog, "Signature-group catalog (JSON)");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--seed", f.seed, "Top-level seed");
  if (with_baseline)
    cmd->add_option("--baseline", f.baseline, "Baseline strategy name");
}

RunConfig ConfigFromFlags(const CommonFlags& f) {
  if (f.config.empty()) throw ConfigError("--config is required");
  RunConfig c = LoadRunConfig(f.config);
  if (!f.stream.empty()) c.stream = f.stream;
  if (!f.catalog.empty()) c.catalog = f.catalog;
  if (!f.out.empty()) c.out = f.out;
  if (f.seed) {
    c.seed = *f.seed;
    c.engine.seed = *f.seed;
  }
  if (!f.baseline.empty()) c.baseline = f.baseline;
  c.Validate();
  return c;
}

int CmdSimulate(const CommonFlags& flags, bool export_events, std::ostream& out) {
  const RunConfig config = ConfigFromFlags(flags);
  if (config.strategies.empty())
    throw ConfigError("config lists no strategies to simulate");
  const CommitStream stream = LoadInputs(config);
  const SimulateOutput result = SimulateAll(config, stream, export_events);
  json all = json::array();
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    const SimulationReport& r = result.reports[i];
    const std::string stem = FileStem(r.strategy);
    WriteFile(config.out / (stem + ".report.json"), ReportToJson(r).dump(2) + "\n");
    if (export_events)
      WriteFile(config.out / (stem + ".events.jsonl"), result.event_logs[i]);
    all.push_back(ReportToJson(r));
    out << ReportLine(r, config.cost.currency) << "\n";
  }
  WriteFile(config.out / "reports.json", all.dump(2) + "\n");
  WriteFile(config.out / "summary.csv",
            ReportsToCsv(result.reports, result.baseline.has_value()));
  if (result.baseline) {
    const SimulationReport& base = result.reports[*result.baseline];
    for (std::size_t i = 0; i < result.reports.size(); ++i)
      if (i != *result.baseline)
        PrintExtrapolation(out, result.reports[i], base, config.cost.currency);
  }
  out << "cost rate: " << Format("%.6f", result.rate) << " "
      << config.cost.currency << "/h\n";
  out << "wrote " << (config.out / "summary.csv").string() << "\n";
  return kExitOk;
}

int CmdCompare(const CommonFlags& flags, const std::vector<std::string>& files,
               std::ostream& out) {
  std::vector<SimulationReport> reports;
  std::optional<std::string> baseline;
  fs::path out_dir = flags.out;
  if (!files.empty()) {
    for (const std::string& file : files) {
      const json j = ReadJsonFile(file);
      if (j.is_array()) {
        for (const json& r : j) reports.push_back(ReportFromJson(r));
      } else {
        reports.push_back(ReportFromJson(j));
      }
    }
    if (!flags.baseline.empty()) baseline = flags.baseline;
  } else if (!flags.config.empty()) {
    const RunConfig config = ConfigFromFlags(flags);
    const CommitStream stream = LoadInputs(config);
    reports = SimulateAll(config, stream, false).reports;
    baseline = config.baseline;
    if (out_dir.empty()) out_dir = config.out;
  } else {
    throw ConfigError("compare needs report files or --config");
  }
  if (reports.size() < 2)
    throw ConfigError("compare needs at least two reports, got " +
                      std::to_string(reports.size()));
  std::optional<std::size_t> base_index;
  if (baseline) {
    for (std::size_t i = 0; i < reports.size() && !base_index; ++i)
      if (reports[i].strategy == *baseline) base_index = i;
    if (!base_index)
      throw ConfigError("baseline '" + *baseline + "' is not among the reports");
  }
  const std::vector<ParetoAnnotation> notes = AnnotatePareto(reports, base_index);
  for (const ParetoAnnotation& a : notes) {
    out << a.strategy << ": " << (a.dominated ? "dominated" : "non-dominated");
    if (a.pareto_improvement) out << ", pareto-improvement";
    out << "\n";
  }
  if (!out_dir.empty()) {
    json doc;
    doc["baseline"] = baseline ? json(*baseline) : json(nullptr);
    doc["strategies"] = ParetoToJson(notes);
    WriteFile(out_dir / "pareto.json", doc.dump(2) + "\n");
  }
  return kExitOk;
}

int CmdTune(const CommonFlags& flags, const std::vector<std::string>& kinds,
            std::optional<std::size_t> budget, std::optional<std::size_t> threads,
            std::ostream& out) {
  RunConfig config = ConfigFromFlags(flags);
  if (!kinds.empty()) {
    config.tune.strategies.clear();
    for (const std::string& k : kinds)
      config.tune.strategies.push_back(StrategyKind::Parse(k));
  }
  if (budget) config.tune.evaluations = *budget;
  if (threads) config.threads = *threads;
  config.Validate();
  const CommitStream stream = LoadInputs(config);
  const TuneOutput result = TuneAll(config, stream);

  std::vector<SimulationReport> test_reports = {result.baseline_test};
  for (const TuneOutcome& t : result.tuned) {
    const std::string stem = "tune_" + FileStem(t.tuning.kind.Name());
    json evals;
    std::string log;
    for (const Individual& ind : t.tuning.evaluated) {
      json e;
      e["evaluation"] = ind.evaluation;
      e["genes"] = ind.genes;
      e["total_tests"] = ind.objectives.total_tests;
      e["max_ttc_hours"] = ind.objectives.max_ttc_hours;
      e["undetected_regressors"] = ind.undetected;
      log += e.dump() + "\n";
    }
    WriteFile(config.out / (stem + ".evaluations.jsonl"), log);
    json doc = TuneResultToJson(t.tuning);
    doc["baseline_eval_max_ttc_hours"] =
        result.baseline_eval.max_ttc_hours
            ? json(*result.baseline_eval.max_ttc_hours)
            : json(nullptr);
    doc["test_report"] = ReportToJson(t.test_report);
    WriteFile(config.out / (stem + ".json"), doc.dump(2) + "\n");
    out << "tune " << t.tuning.kind.Name() << ": " << t.tuning.evaluated.size()
        << " evaluations, front size " << t.tuning.front.size() << ", chosen "
        << StrategyConfigToJson(t.tuning.chosen_config).dump() << "\n";
    test_reports.push_back(t.test_report);
  }
  out << "test split replay:\n";
  for (const SimulationReport& r : test_reports)
    out << "  " << ReportLine(r, config.cost.currency) << "\n";
  for (std::size_t i = 1; i < test_reports.size(); ++i)
    PrintExtrapolation(out, test_reports[i], test_reports[0], config.cost.currency);
  json all = json::array();
  for (const SimulationReport& r : test_reports) all.push_back(ReportToJson(r));
  WriteFile(config.out / "tune_reports.json", all.dump(2) + "\n");
  WriteFile(config.out / "tune_summary.csv", ReportsToCsv(test_reports, true));
  return kExitOk;
}

struct GenerateFlags {
  std::string config;
  std::string out;
  std::string stream;
  std::string catalog;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> commits;
  std::optional<double> interarrival;
  std::optional<double> positive_rate;
  std::optional<double> risk_quality;
  std::optional<double> target_auc;
  std::vector<int> groups;
  std::optional<double> duration;
};

int CmdGenerate(const GenerateFlags& f, std::ostream& out) {
  GenSpec spec;
  if (!f.config.empty()) spec = GenSpecFromJson(ReadJsonFile(f.config));
  if (f.seed) spec.seed = *f.seed;
  if (f.commits) spec.n_commits = *f.commits;
  if (f.interarrival) spec.mean_interarrival_minutes = *f.interarrival;
  if (f.positive_rate) spec.positive_rate = *f.positive_rate;
  if (f.risk_quality) spec.risk_quality = *f.risk_quality;
  if (f.target_auc) spec.target_auc = *f.target_auc;
  if (f.duration) spec.group_duration_minutes = *f.duration;
  if (!f.groups.empty()) {
    if (f.groups.size() != 4)
      throw ConfigError("--groups takes four counts: android,windows,linux,macos");
    for (std::size_t i = 0; i < 4; ++i) spec.groups_per_platform[i] = f.groups[i];
  }
  if (f.out.empty() && (f.stream.empty() || f.catalog.empty()))
    throw ConfigError("generate needs --out or both --stream and --catalog");
  const fs::path dir = f.out.empty() ? fs::path(".") : fs::path(f.out);
  const fs::path stream_path = f.stream.empty() ? dir / "stream.jsonl" : fs::path(f.stream);
  const fs::path catalog_path =
      f.catalog.empty() ? dir / "catalog.json" : fs::path(f.catalog);
  const fs::path truth_path = stream_path.parent_path() / "truth.json";

  const CommitStream stream = Generate(spec);
  WriteFile(stream_path, SerializeStream(stream));
  WriteFile(catalog_path, SerializeCatalog(stream.catalog()));
  json truth = TruthSidecar(stream, spec);
  truth["spec"] = GenSpecToJson(spec);
  WriteFile(truth_path, truth.dump(2) + "\n");
  std::size_t regressors = 0;
  for (const Commit& c : stream.commits()) regressors += c.label;
  out << "generated " << stream.size() << " commits (" << regressors
      << " regressors) over " << stream.group_count() << " groups\n";
  out << "wrote " << stream_path.string() << ", " << catalog_path.string()
      << ", " << truth_path.string() << "\n";
  return kExitOk;
}

}  // namespace

SimulateOutput SimulateAll(const RunConfig& config, const CommitStream& stream,
                           bool export_events) {
  const std::size_t n = config.strategies.size();
  SimulateOutput result;
  result.reports.resize(n);
  if (export_events) result.event_logs.resize(n);
  ParallelFor(n, config.threads, [&](std::size_t i) {
    const NamedStrategy& s = config.strategies[i];
    const SimulationResult sim = RunSimulation(stream, s.config, config.engine);
    result.reports[i] = Summarize(s.label, sim, stream, 1.0);
    if (export_events) result.event_logs[i] = EventLogJsonl(sim, stream);
  });
  if (config.baseline) {
    for (std::size_t i = 0; i < n; ++i)
      if (config.strategies[i].label == *config.baseline) result.baseline = i;
  }
  if (config.cost.rate) {
    result.rate = *config.cost.rate;
  } else if (result.baseline &&
             result.reports[*result.baseline].infra_usage_hours > 0.0) {
    result.rate = config.cost.model.baseline_cost /
                  result.reports[*result.baseline].infra_usage_hours;
  } else {
    result.rate = config.cost.model.rate();
  }
  for (SimulationReport& r : result.reports) Rescale(r, result.rate);
  if (result.baseline) {
    const SimulationReport base = result.reports[*result.baseline];
    for (SimulationReport& r : result.reports) ApplySavings(r, base);
  }
  return result;
}

TuneOutput TuneAll(const RunConfig& config, const CommitStream& stream) {
  if (config.tune.strategies.empty())
    throw ConfigError("no strategies to tune: set tune.strategies or --strategy");
  const StreamSplits splits = ChronologicalSplit(stream, config.split);
  if (splits.eval.empty() || splits.test.empty())
    throw ConfigError("eval and test splits must both be non-empty");

  StrategyConfig baseline_config;
  std::string baseline_label = "twsb";
  if (config.baseline) {
    baseline_label = *config.baseline;
    baseline_config = config.FindStrategy(*config.baseline)->config;
  } else {
    baseline_config.kind = StrategyKind::Parse("twsb");
  }

  TuneOutput out;
  out.baseline_eval = Replay(baseline_config, splits.eval, config.engine, 1.0);
  out.baseline_eval.strategy = baseline_label;
  out.baseline_test = Replay(baseline_config, splits.test, config.engine, 1.0);
  out.baseline_test.strategy = baseline_label;

  TuneOptions options;
  options.threads = config.threads;
  options.ttc_bound = out.baseline_eval.max_ttc_hours.value_or(0.0);
  for (std::size_t i = 0; i < config.tune.strategies.size(); ++i) {
    const StrategyKind kind = config.tune.strategies[i];
    const ParamSpace space = config.tune.SpaceFor(kind);
    TuneBudget budget =
        TuneBudget::ForDimension(space.dimension(), DeriveSeed(config.seed, i + 1));
    if (config.tune.evaluations) {
      budget.evaluations = *config.tune.evaluations;
      budget.population = std::max<std::size_t>(
          2, std::min(budget.evaluations / 2, 20 * space.dimension()));
    }
    TuneOutcome outcome;
    outcome.tuning = Tune(kind, space, splits.eval, config.engine, budget, options);
    outcome.test_report =
        Replay(outcome.tuning.chosen_config, splits.test, config.engine, 1.0);
    out.tuned.push_back(std::move(outcome));
  }

  if (config.cost.rate) {
    out.rate = *config.cost.rate;
  } else if (out.baseline_test.infra_usage_hours > 0.0) {
    out.rate = config.cost.model.baseline_cost / out.baseline_test.infra_usage_hours;
  } else {
    out.rate = config.cost.model.rate();
  }
  Rescale(out.baseline_eval, out.rate);
  Rescale(out.baseline_test, out.rate);
  ApplySavings(out.baseline_test, out.baseline_test);
  for (TuneOutcome& t : out.tuned) {
    Rescale(t.test_report, out.rate);
    ApplySavings(t.test_report, out.baseline_test);
  }
  return out;
}

GenSpec GenSpecFromJson(const json& j) {
  if (!j.is_object()) throw ConfigError("generator spec must be a JSON object");
  GenSpec s;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "n_commits") {
        s.n_commits = v.get<std::size_t>();
      } else if (key == "mean_interarrival_minutes") {
        s.mean_interarrival_minutes = v.get<double>();
      } else if (key == "positive_rate") {
        s.positive_rate = v.get<double>();
      } else if (key == "risk_quality") {
        s.risk_quality = v.get<double>();
      } else if (key == "target_auc") {
        if (!v.is_null()) s.target_auc = v.get<double>();
      } else if (key == "groups_per_platform") {
        s.groups_per_platform = v.get<std::array<int, 4>>();
      } else if (key == "group_duration_minutes") {
        s.group_duration_minutes = v.get<double>();
      } else if (key == "min_period_hours") {
        s.min_period_hours = v.get<double>();
      } else if (key == "max_period_hours") {
        s.max_period_hours = v.get<double>();
      } else if (key == "min_failing_groups") {
        s.min_failing_groups = v.get<int>();
      } else if (key == "max_failing_groups") {
        s.max_failing_groups = v.get<int>();
      } else if (key == "seed") {
        s.seed = v.get<std::uint64_t>();
      } else {
        throw ConfigError("unknown generator key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("generator spec: ") + e.what());
  }
  s.Validate();
  return s;
}

json GenSpecToJson(const GenSpec& s) {
  json j;
  j["n_commits"] = s.n_commits;
  j["mean_interarrival_minutes"] = s.mean_interarrival_minutes;
  j["positive_rate"] = s.positive_rate;
  j["risk_quality"] = s.risk_quality;
  j["target_auc"] = s.target_auc ? json(*s.target_auc) : json(nullptr);
  j["groups_per_platform"] = s.groups_per_platform;
  j["group_duration_minutes"] = s.group_duration_minutes;
  j["min_period_hours"] = s.min_period_hours;
  j["max_period_hours"] = s.max_period_hours;
  j["min_failing_groups"] = s.min_failing_groups;
  j["max_failing_groups"] = s.max_failing_groups;
  j["seed"] = s.seed;
  return j;
}

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const InvariantError*>(&e)) return kExitInvariant;
  if (dynamic_cast<const Error*>(&e)) return kExitUsage;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return kExitUsage;
  return kExitInvariant;
}

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Risk-aware batch testing simulator", "riskbatch"};
  app.require_subcommand(1);

  CommonFlags sim_flags;
  bool export_events = false;
  CLI::App* sim = app.add_subcommand("simulate", "Run the configured strategies");
  AddCommon(sim, sim_flags, true);
  sim->add_flag("--export-events", export_events,
                "Write one JSON Lines event log per strategy");

  CommonFlags cmp_flags;
  std::vector<std::string> report_files;
  CLI::App* cmp = app.add_subcommand("compare", "Pareto-annotate reports");
  AddCommon(cmp, cmp_flags, true);
  cmp->add_option("reports", report_files, "Report JSON files");

  CommonFlags tune_flags;
  std::vector<std::string> tune_kinds;
  std::optional<std::size_t> tune_budget;
  std::optional<std::size_t> tune_threads;
  CLI::App* tune = app.add_subcommand("tune", "Tune on eval, replay on test");
  AddCommon(tune, tune_flags, true);
  tune->add_option("--strategy", tune_kinds, "Strategy kind to tune (repeatable)");
  tune->add_option("--budget", tune_budget, "Evaluations per strategy");
  tune->add_option("--threads", tune_threads, "Parallel evaluations");

  GenerateFlags gen_flags;
  CLI::App* gen = app.add_subcommand("generate", "Write a synthetic stream");
  gen->add_option("--config", gen_flags.config, "Generator spec (JSON)");
  gen->add_option("--out", gen_flags.out, "Output directory");
  gen->add_option("--stream", gen_flags.stream, "Stream output path");
  gen->add_option("--catalog", gen_flags.catalog, "Catalog output path");
  gen->add_option("--seed", gen_flags.seed, "Seed");
  gen->add_option("--commits", gen_flags.commits, "Number of commits");
  gen->add_option("--interarrival-minutes", gen_flags.interarrival,
                  "Mean minutes between landings");
  gen->add_option("--positive-rate", gen_flags.positive_rate, "Regressor rate");
  gen->add_option("--risk-quality", gen_flags.risk_quality,
                  "Risk separation parameter");
  gen->add_option("--target-auc", gen_flags.target_auc,
                  "Calibrate risk quality to this AUC");
  gen->add_option("--groups", gen_flags.groups,
                  "Groups per platform: android windows linux macos")
      ->delimiter(',');
  gen->add_option("--duration-minutes", gen_flags.duration,
                  "Group duration in minutes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sim) return CmdSimulate(sim_flags, export_events, out);
    if (*cmp) return CmdCompare(cmp_flags, report_files, out);
    if (*tune) return CmdTune(tune_flags, tune_kinds, tune_budget, tune_threads, out);
    if (*gen) return CmdGenerate(gen_flags, out);
  } catch (const std::exception& e) {
    const int code = ExitCodeFor(e);
    err << (code == kExitInvariant ? "internal error: " : "error: ") << e.what()
        << "\n";
    return code;
  }
  return kExitUsage;
}

}  // namespace riskbatch
