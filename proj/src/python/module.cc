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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "riskbatch/cli.h"
#include "riskbatch/config.h"
#include "riskbatch/domain.h"
#include "riskbatch/engine.h"
#include "riskbatch/errors.h"
#include "riskbatch/metrics.h"
#include "riskbatch/riskmath.h"
#include "riskbatch/streamgen.h"
#include "riskbatch/tuner.h"

namespace py = pybind11;

namespace riskbatch {
namespace {

py::object ToPython(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json FromPython(const py::object& o) {
  if (o.is_none()) return nlohmann::json::object();
  const std::string text = py::str(py::module_::import("json").attr("dumps")(o));
  return nlohmann::json::parse(text);
}

EngineConfig EngineFromPython(const py::object& o) {
  EngineConfig engine;
  if (o.is_none()) return engine;
  const nlohmann::json j = FromPython(o);
  nlohmann::json wrapped = {{"engine", j}};
  return ParseRunConfig(wrapped.dump(), ".", "<engine>").engine;
}

py::object Simulate(const CommitStream& stream, const py::object& strategy,
                    const py::object& engine, double rate, bool events) {
  const StrategyConfig config = StrategyConfigFromJson(FromPython(strategy));
  const EngineConfig e = EngineFromPython(engine);
  SimulationResult result;
  {
    py::gil_scoped_release release;
    result = RunSimulation(stream, config, e);
  }
  nlohmann::json report =
      ReportToJson(Summarize(config.kind.Name(), result, stream, rate));
  if (events) report["events"] = EventLogJsonl(result, stream);
  return ToPython(report);
}

py::object TuneKind(const CommitStream& stream, const std::string& kind_name,
                    std::optional<std::size_t> evaluations, std::uint64_t seed,
                    std::size_t threads, std::optional<double> ttc_bound,
                    const py::object& engine) {
  const StrategyKind kind = StrategyKind::Parse(kind_name);
  const ParamSpace space = DefaultSpace(kind);
  TuneBudget budget = TuneBudget::ForDimension(space.dimension(), seed);
  if (evaluations) {
    budget.evaluations = *evaluations;
    budget.population = std::max<std::size_t>(
        2, std::min(*evaluations / 2, 20 * space.dimension()));
  }
  TuneOptions options;
  options.threads = threads;
  options.ttc_bound = ttc_bound;
  const EngineConfig e = EngineFromPython(engine);
  TuneResult result;
  {
    py::gil_scoped_release release;
    result = Tune(kind, space, stream, e, budget, options);
  }
  return ToPython(TuneResultToJson(result));
}

CommitStream GenerateFromPython(const py::kwargs& kwargs) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, value] : kwargs)
    j[py::str(key).cast<std::string>()] =
        FromPython(py::reinterpret_borrow<py::object>(value));
  return Generate(GenSpecFromJson(j));
}

py::tuple RunCliFromPython(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"riskbatch"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code =
      RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace
}  // namespace riskbatch

PYBIND11_MODULE(_core, m) {
  using namespace riskbatch;
  m.doc() = "Risk-aware batch testing simulator";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<ValidationError>(m, "ValidationError", base);
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<InvariantError>(m, "InvariantError", base);

  m.def("batch_fail_prob",
        [](const std::vector<double>& risks) { return riskmath::BatchFailProb(risks); },
        py::arg("risks"));
  m.def("aged_risk", &riskmath::AgedRisk, py::arg("risk"), py::arg("wait_hours"),
        py::arg("aging_rate"));
  m.def("linear_risk_sum",
        [](const std::vector<double>& risks) { return riskmath::LinearRiskSum(risks); },
        py::arg("risks"));

  py::class_<CommitStream>(m, "CommitStream")
      .def_static(
          "load",
          [](const std::string& stream, const std::string& catalog) {
            return LoadStream(stream, catalog);
          },
          py::arg("stream"), py::arg("catalog"))
      .def_static(
          "parse",
          [](const std::string& jsonl, const std::string& catalog_json) {
            return ParseStream(jsonl, ParseCatalog(catalog_json));
          },
          py::arg("jsonl"), py::arg("catalog_json"))
      .def("save",
           [](const CommitStream& s, const std::string& stream,
              const std::string& catalog) {
             SaveStream(stream, s);
             SaveCatalog(catalog, s.catalog());
           },
           py::arg("stream"), py::arg("catalog"))
      .def("to_jsonl", &SerializeStream)
      .def("catalog_json",
           [](const CommitStream& s) { return SerializeCatalog(s.catalog()); })
      .def("__len__", &CommitStream::size)
      .def_property_readonly("group_count", &CommitStream::group_count)
      .def_property_readonly("stream_end", &CommitStream::stream_end)
      .def_property_readonly("regressor_count",
                             [](const CommitStream& s) {
                               std::size_t n = 0;
                               for (const Commit& c : s.commits()) n += c.label;
                               return n;
                             })
      .def("slice", &CommitStream::Slice, py::arg("begin"), py::arg("end"))
      .def("empirical_auc", [](const CommitStream& s) { return EmpiricalAuc(s); });

  m.def("generate", &GenerateFromPython,
        "Synthetic stream; keyword arguments are generator spec fields.");
  m.def(
      "split",
      [](const CommitStream& s, double train, double eval, double test) {
        const StreamSplits parts = ChronologicalSplit(s, SplitSpec{train, eval, test});
        return py::make_tuple(parts.train, parts.eval, parts.test);
      },
      py::arg("stream"), py::arg("train") = 0.65, py::arg("eval") = 0.10,
      py::arg("test") = 0.25);
  m.def("simulate", &Simulate, py::arg("stream"), py::arg("strategy"),
        py::arg("engine") = py::none(), py::arg("rate") = 390000.0 / 112108.0,
        py::arg("events") = false,
        "Runs one strategy and returns its report as a dict.");
  m.def("tune", &TuneKind, py::arg("stream"), py::arg("kind"),
        py::arg("evaluations") = py::none(), py::arg("seed") = 0,
        py::arg("threads") = 1, py::arg("ttc_bound") = py::none(),
        py::arg("engine") = py::none(),
        "Tunes a strategy kind over its default bounds.");
  m.def("run_cli", &RunCliFromPython, py::arg("args"),
        "Runs the command-line front end; returns (exit_code, stdout, stderr).");
  m.def("valid_kinds", &ValidKindNames);
}
