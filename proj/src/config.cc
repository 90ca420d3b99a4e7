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

#include "riskbatch/config.h"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "riskbatch/errors.h"

namespace riskbatch {
namespace {

using nlohmann::json;

void CheckKeys(const json& j, std::string_view where,
               std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (std::string_view a : allowed) ok = ok || key == a;
    if (!ok)
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
  }
}

double Number(const json& j, const char* key, std::string_view where) {
  if (!j.at(key).is_number())
    throw ConfigError(std::string(where) + "." + key + " must be a number");
  return j.at(key).get<double>();
}

std::string String(const json& j, const char* key, std::string_view where) {
  if (!j.at(key).is_string())
    throw ConfigError(std::string(where) + "." + key + " must be a string");
  return j.at(key).get<std::string>();
}

std::size_t Count(const json& j, const char* key, std::string_view where) {
  if (!j.at(key).is_number_unsigned())
    throw ConfigError(std::string(where) + "." + key +
                      " must be a non-negative integer");
  return j.at(key).get<std::size_t>();
}

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

ParamSpace ParseSpace(const json& j, std::string_view where) {
  if (!j.is_array())
    throw ConfigError(std::string(where) + " must be an array of bounds");
  ParamSpace space;
  for (const json& b : j) {
    CheckKeys(b, where, {"name", "lo", "hi", "integer"});
    if (!b.contains("name") || !b.contains("lo") || !b.contains("hi"))
      throw ConfigError(std::string(where) + " entries need name, lo and hi");
    ParamBound bound;
    bound.name = String(b, "name", where);
    bound.lo = Number(b, "lo", where);
    bound.hi = Number(b, "hi", where);
    bound.integer = bound.name == "batch_size";
    if (b.contains("integer")) {
      if (!b.at("integer").is_boolean())
        throw ConfigError(std::string(where) + ".integer must be a boolean");
      bound.integer = b.at("integer").get<bool>();
    }
    space.params.push_back(std::move(bound));
  }
  space.Validate();
  return space;
}

json SpaceToJson(const ParamSpace& space) {
  json out = json::array();
  for (const ParamBound& b : space.params)
    out.push_back({{"name", b.name}, {"lo", b.lo}, {"hi", b.hi},
                   {"integer", b.integer}});
  return out;
}

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t component) {
  // SplitMix64 finalizer over the pair.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (component + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ParamSpace TuneSettings::SpaceFor(StrategyKind kind) const {
  auto it = bounds.find(kind.Name());
  return it != bounds.end() ? it->second : DefaultSpace(kind);
}

const NamedStrategy* RunConfig::FindStrategy(std::string_view label) const {
  for (const NamedStrategy& s : strategies)
    if (s.label == label) return &s;
  return nullptr;
}

void RunConfig::Validate() const {
  engine.Validate();
  try {
    split.Validate();
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  if (cost.rate && !(*cost.rate > 0.0))
    throw ConfigError("cost.rate must be positive");
  cost.model.rate();
  if (threads == 0) throw ConfigError("threads must be at least 1");
  std::set<std::string> labels;
  for (const NamedStrategy& s : strategies) {
    s.config.Validate();
    if (!labels.insert(s.label).second)
      throw ConfigError("duplicate strategy name '" + s.label + "'");
  }
  if (baseline && !FindStrategy(*baseline))
    throw ConfigError("baseline '" + *baseline +
                      "' is not one of the configured strategies");
  for (const auto& [name, space] : tune.bounds) {
    StrategyKind::Parse(name);
    space.Validate();
  }
  if (tune.evaluations && *tune.evaluations == 0)
    throw ConfigError("tune.evaluations must be positive");
}

RunConfig ParseRunConfig(std::string_view text,
                         const std::filesystem::path& base_dir,
                         std::string_view source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  }
  RunConfig c;
  try {
    CheckKeys(j, "config",
              {"stream", "catalog", "out", "seed", "baseline", "engine",
               "split", "cost", "threads", "strategies", "tune"});
    if (j.contains("stream"))
      c.stream = Resolve(base_dir, String(j, "stream", "config"));
    if (j.contains("catalog"))
      c.catalog = Resolve(base_dir, String(j, "catalog", "config"));
    c.out = Resolve(base_dir, j.contains("out") ? String(j, "out", "config") : "out");
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned())
        throw ConfigError("config.seed must be a non-negative integer");
      c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("baseline") && !j.at("baseline").is_null())
      c.baseline = String(j, "baseline", "config");
    if (j.contains("threads")) c.threads = Count(j, "threads", "config");

    if (j.contains("engine")) {
      const json& e = j.at("engine");
      CheckKeys(e, "engine", {"build_delay_minutes", "tick_minutes", "pools"});
      if (e.contains("build_delay_minutes"))
        c.engine.build_delay_minutes = Number(e, "build_delay_minutes", "engine");
      if (e.contains("tick_minutes"))
        c.engine.tick_minutes = Number(e, "tick_minutes", "engine");
      if (e.contains("pools")) {
        const json& p = e.at("pools");
        if (!p.is_object()) throw ConfigError("engine.pools must be an object");
        for (const auto& [name, value] : p.items()) {
          Platform platform;
          try {
            platform = ParsePlatform(name);
          } catch (const Error&) {
            throw ConfigError("engine.pools: unknown platform '" + name + "'");
          }
          if (!value.is_number_integer())
            throw ConfigError("engine.pools." + name + " must be an integer");
          c.engine.capacity(platform) = value.get<int>();
        }
      }
    }
    c.engine.seed = c.seed;

    if (j.contains("split")) {
      const json& s = j.at("split");
      CheckKeys(s, "split", {"train", "eval", "test"});
      if (s.contains("train")) c.split.train_frac = Number(s, "train", "split");
      if (s.contains("eval")) c.split.eval_frac = Number(s, "eval", "split");
      if (s.contains("test")) c.split.test_frac = Number(s, "test", "split");
    }

    if (j.contains("cost")) {
      const json& s = j.at("cost");
      CheckKeys(s, "cost", {"baseline_cost", "baseline_infra_hours", "rate",
                            "currency"});
      if (s.contains("baseline_cost"))
        c.cost.model.baseline_cost = Number(s, "baseline_cost", "cost");
      if (s.contains("baseline_infra_hours"))
        c.cost.model.baseline_infra_hours =
            Number(s, "baseline_infra_hours", "cost");
      if (s.contains("rate") && !s.at("rate").is_null())
        c.cost.rate = Number(s, "rate", "cost");
      if (s.contains("currency")) c.cost.currency = String(s, "currency", "cost");
    }

    if (j.contains("strategies")) {
      const json& list = j.at("strategies");
      if (!list.is_array()) throw ConfigError("config.strategies must be an array");
      for (const json& entry : list) {
        NamedStrategy s;
        s.config = StrategyConfigFromJson(entry);
        s.label = entry.contains("name") ? String(entry, "name", "strategy")
                                         : s.config.kind.Name();
        if (s.label.empty()) throw ConfigError("strategy name must not be empty");
        c.strategies.push_back(std::move(s));
      }
    }

    if (j.contains("tune")) {
      const json& t = j.at("tune");
      CheckKeys(t, "tune", {"strategies", "evaluations", "bounds"});
      if (t.contains("strategies")) {
        if (!t.at("strategies").is_array())
          throw ConfigError("tune.strategies must be an array of kind names");
        for (const json& k : t.at("strategies")) {
          if (!k.is_string())
            throw ConfigError("tune.strategies must be an array of kind names");
          c.tune.strategies.push_back(StrategyKind::Parse(k.get<std::string>()));
        }
      }
      if (t.contains("evaluations") && !t.at("evaluations").is_null())
        c.tune.evaluations = Count(t, "evaluations", "tune");
      if (t.contains("bounds")) {
        const json& b = t.at("bounds");
        if (!b.is_object()) throw ConfigError("tune.bounds must be an object");
        for (const auto& [name, space] : b.items()) {
          const std::string canonical = StrategyKind::Parse(name).Name();
          c.tune.bounds[canonical] = ParseSpace(space, "tune.bounds." + name);
        }
      }
    }
    c.Validate();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  }
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  std::filesystem::path base = path.parent_path();
  if (base.empty()) base = ".";
  return ParseRunConfig(buf.str(), base, path.string());
}

json RunConfigToJson(const RunConfig& c) {
  json j;
  j["stream"] = c.stream.generic_string();
  j["catalog"] = c.catalog.generic_string();
  j["out"] = c.out.generic_string();
  j["seed"] = c.seed;
  j["baseline"] = c.baseline ? json(*c.baseline) : json(nullptr);
  json pools;
  for (Platform p : kAllPlatforms) {
    std::string name(PlatformName(p));
    for (char& ch : name) ch = static_cast<char>(std::tolower(ch));
    pools[name] = c.engine.capacity(p);
  }
  j["engine"] = {{"build_delay_minutes", c.engine.build_delay_minutes},
                 {"tick_minutes", c.engine.tick_minutes},
                 {"pools", pools}};
  j["split"] = {{"train", c.split.train_frac},
                {"eval", c.split.eval_frac},
                {"test", c.split.test_frac}};
  j["cost"] = {{"baseline_cost", c.cost.model.baseline_cost},
               {"baseline_infra_hours", c.cost.model.baseline_infra_hours},
               {"rate", c.cost.rate ? json(*c.cost.rate) : json(nullptr)},
               {"currency", c.cost.currency}};
  j["threads"] = c.threads;
  json strategies = json::array();
  for (const NamedStrategy& s : c.strategies) {
    json entry = StrategyConfigToJson(s.config);
    entry["name"] = s.label;
    strategies.push_back(std::move(entry));
  }
  j["strategies"] = std::move(strategies);
  json tune_kinds = json::array();
  for (const StrategyKind& k : c.tune.strategies) tune_kinds.push_back(k.Name());
  json bounds = json::object();
  for (const auto& [name, space] : c.tune.bounds) bounds[name] = SpaceToJson(space);
  j["tune"] = {{"strategies", tune_kinds},
               {"evaluations", c.tune.evaluations ? json(*c.tune.evaluations)
                                                  : json(nullptr)},
               {"bounds", bounds}};
  return j;
}

}  // namespace riskbatch
