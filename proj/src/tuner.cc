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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include "riskbatch/errors.h"

namespace riskbatch {
namespace {

constexpr double kSbxEta = 15.0;
constexpr double kMutationEta = 20.0;
constexpr double kCrossoverProb = 0.9;
constexpr int kRemutateTries = 10;
constexpr int kRandomTries = 1000;
constexpr std::size_t kEnumerableLimit = std::size_t{1} << 20;

constexpr std::string_view kParamNames[] = {
    "window_hours", "batch_size", "threshold", "aging_rate",
    "high_risk_trigger"};

bool KnownParam(std::string_view name) {
  return std::find(std::begin(kParamNames), std::end(kParamNames), name) !=
         std::end(kParamNames);
}

// Operator range of a gene; integer genes get half a step on either side so
// rounding gives every value the same share.
double OpLo(const ParamBound& b) { return b.integer ? b.lo - 0.4999 : b.lo; }
double OpHi(const ParamBound& b) { return b.integer ? b.hi + 0.4999 : b.hi; }

}  // namespace

void ParamSpace::Validate() const {
  if (params.empty()) throw ConfigError("parameter space is empty");
  std::set<std::string> names;
  for (const ParamBound& b : params) {
    if (!KnownParam(b.name))
      throw ConfigError("unknown tunable parameter '" + b.name + "'");
    if (!names.insert(b.name).second)
      throw ConfigError("duplicate tunable parameter '" + b.name + "'");
    if (!(b.lo < b.hi) || !std::isfinite(b.lo) || !std::isfinite(b.hi))
      throw ConfigError("parameter '" + b.name + "' needs lo < hi");
    if (b.integer && (b.lo != std::floor(b.lo) || b.hi != std::floor(b.hi)))
      throw ConfigError("integer parameter '" + b.name +
                        "' needs integral bounds");
  }
}

std::vector<double> ParamSpace::Normalize(std::vector<double> genes) const {
  if (genes.size() != params.size())
    throw InvariantError("gene vector does not match the parameter space");
  for (std::size_t i = 0; i < genes.size(); ++i) {
    const ParamBound& b = params[i];
    double v = genes[i];
    if (b.integer) v = std::round(v);
    genes[i] = std::clamp(v, b.lo, b.hi);
  }
  return genes;
}

StrategyConfig ParamSpace::Apply(StrategyKind kind,
                                 std::span<const double> genes) const {
  if (genes.size() != params.size())
    throw InvariantError("gene vector does not match the parameter space");
  StrategyConfig config;
  config.kind = kind;
  for (std::size_t i = 0; i < genes.size(); ++i) {
    const std::string& name = params[i].name;
    const double v = genes[i];
    if (name == "window_hours") {
      config.window_hours = v;
    } else if (name == "batch_size") {
      config.batch_size = static_cast<int>(std::llround(v));
    } else if (name == "threshold") {
      config.threshold = v;
    } else if (name == "aging_rate") {
      config.aging_rate = v;
    } else if (name == "high_risk_trigger") {
      config.high_risk_trigger = v;
    } else {
      throw ConfigError("unknown tunable parameter '" + name + "'");
    }
  }
  return config;
}

ParamSpace DefaultSpace(StrategyKind kind) {
  const bool linear = kind.aggregation == Aggregation::kLinear;
  ParamSpace space;
  switch (kind.family) {
    case Family::kET:
    case Family::kTWSB:
      throw ConfigError(kind.Name() + " has no tunable parameters");
    case Family::kTWB:
      space.params = {{"window_hours", 0.25, 24.0, false}};
      break;
    case Family::kFSB:
      space.params = {{"batch_size", 1.0, 50.0, true}};
      break;
    case Family::kRASB:
      space.params = {{"threshold", 0.01, linear ? 50.0 : 0.99, false}};
      break;
    case Family::kRAPB:
      space.params = {{"threshold", 0.01, linear ? 50.0 : 0.99, false},
                      {"aging_rate", 0.001, 2.0, false}};
      break;
    case Family::kRATB:
      space.params = {{"window_hours", 0.25, 24.0, false},
                      {"high_risk_trigger", 0.05, 1.0, false}};
      break;
  }
  return space;
}

bool Dominates(const Objectives& x, const Objectives& y) {
  return x.total_tests <= y.total_tests && x.max_ttc_hours <= y.max_ttc_hours &&
         (x.total_tests < y.total_tests || x.max_ttc_hours < y.max_ttc_hours);
}

TuneBudget TuneBudget::ForDimension(std::size_t d, std::uint64_t seed) {
  TuneBudget b;
  b.evaluations = 50 * d;
  b.population = std::min(b.evaluations / 2, 20 * d);
  b.seed = seed;
  return b;
}

void TuneBudget::Validate() const {
  if (evaluations == 0) throw ConfigError("tuning budget must be positive");
  if (population < 2) throw ConfigError("population size must be at least 2");
  if (evaluations < population)
    throw ConfigError("evaluation budget must be at least the population size");
}

std::vector<std::vector<std::size_t>> NondominatedSort(
    std::span<const Objectives> points, std::span<const double> violation) {
  const std::size_t n = points.size();
  if (!violation.empty() && violation.size() != n)
    throw InvariantError("violation vector does not match the population");
  auto dominates = [&](std::size_t a, std::size_t b) {
    if (!violation.empty() && violation[a] != violation[b])
      return violation[a] < violation[b];
    return Dominates(points[a], points[b]);
  };
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> count(n, 0);
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      if (dominates(a, b)) {
        dominated[a].push_back(b);
      } else if (dominates(b, a)) {
        ++count[a];
      }
    }
    if (count[a] == 0) current.push_back(a);
  }
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t a : current)
      for (std::size_t b : dominated[a])
        if (--count[b] == 0) next.push_back(b);
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> CrowdingDistance(std::span<const Objectives> front) {
  const std::size_t n = front.size();
  std::vector<double> dist(n, 0.0);
  if (n <= 2) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    return dist;
  }
  const auto objective = [&](std::size_t i, int k) {
    return k == 0 ? front[i].total_tests : front[i].max_ttc_hours;
  };
  std::vector<std::size_t> order(n);
  for (int k = 0; k < 2; ++k) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return objective(a, k) < objective(b, k);
    });
    const double lo = objective(order.front(), k);
    const double hi = objective(order.back(), k);
    dist[order.front()] = std::numeric_limits<double>::infinity();
    dist[order.back()] = std::numeric_limits<double>::infinity();
    if (!(hi > lo)) continue;
    for (std::size_t i = 1; i + 1 < n; ++i)
      dist[order[i]] +=
          (objective(order[i + 1], k) - objective(order[i - 1], k)) / (hi - lo);
  }
  return dist;
}

Individual Evaluate(StrategyKind kind, const ParamSpace& space,
                    std::span<const double> genes, const CommitStream& stream,
                    const EngineConfig& engine) {
  const StrategyConfig config = space.Apply(kind, genes);
  const SimulationResult result = RunSimulation(stream, config, engine);
  const SimulationReport report = Summarize(kind.Name(), result, stream, 1.0);
  Individual ind;
  ind.genes.assign(genes.begin(), genes.end());
  ind.objectives.total_tests = static_cast<double>(report.total_tests);
  ind.objectives.max_ttc_hours = report.max_ttc_hours.value_or(0.0);
  ind.undetected = report.undetected_regressors;
  ind.mean_feedback_hours = report.mean_feedback_hours;
  ind.mean_ttc_hours = report.mean_ttc_hours;
  return ind;
}

const Individual& SelectChosen(std::span<const Individual> candidates,
                               std::optional<double> ttc_bound) {
  const Individual* best = nullptr;
  auto cheaper = [](const Individual& a, const Individual& b) {
    if (a.objectives.total_tests != b.objectives.total_tests)
      return a.objectives.total_tests < b.objectives.total_tests;
    if (a.objectives.max_ttc_hours != b.objectives.max_ttc_hours)
      return a.objectives.max_ttc_hours < b.objectives.max_ttc_hours;
    return a.evaluation < b.evaluation;
  };
  auto faster = [](const Individual& a, const Individual& b) {
    if (a.objectives.max_ttc_hours != b.objectives.max_ttc_hours)
      return a.objectives.max_ttc_hours < b.objectives.max_ttc_hours;
    if (a.objectives.total_tests != b.objectives.total_tests)
      return a.objectives.total_tests < b.objectives.total_tests;
    return a.evaluation < b.evaluation;
  };
  for (const Individual& c : candidates) {
    if (!c.feasible()) continue;
    if (ttc_bound && c.objectives.max_ttc_hours > *ttc_bound) continue;
    if (best == nullptr || cheaper(c, *best)) best = &c;
  }
  if (best != nullptr) return *best;
  for (const Individual& c : candidates) {
    if (!c.feasible()) continue;
    if (best == nullptr || faster(c, *best)) best = &c;
  }
  if (best == nullptr)
    throw ValidationError(
        "no feasible configuration: every candidate left regressors undetected");
  return *best;
}

namespace {

class Nsga2 {
 public:
  Nsga2(StrategyKind kind, const ParamSpace& space, const CommitStream& stream,
        const EngineConfig& engine, const TuneBudget& budget,
        const TuneOptions& options)
      : kind_(kind),
        space_(space),
        stream_(stream),
        engine_(engine),
        budget_(budget),
        options_(options),
        rng_(budget.seed) {
    std::size_t cardinality = 1;
    enumerable_ = true;
    for (const ParamBound& b : space_.params) {
      if (!b.integer) {
        enumerable_ = false;
        break;
      }
      cardinality *= static_cast<std::size_t>(b.hi - b.lo + 1);
      if (cardinality > kEnumerableLimit) {
        enumerable_ = false;
        break;
      }
    }
  }

  std::vector<Individual> Run() {
    std::vector<std::vector<double>> initial;
    std::set<std::vector<double>> pending;
    const std::size_t n = std::min(budget_.population, budget_.evaluations);
    while (initial.size() < n) {
      auto g = UnseenRandom(pending);
      if (!g) break;
      pending.insert(*g);
      initial.push_back(std::move(*g));
    }
    std::vector<Individual> population = EvaluateAll(initial);
    RankAndCrowd(population);
    while (evaluated_.size() < budget_.evaluations && !population.empty()) {
      const std::size_t want =
          std::min(population.size(), budget_.evaluations - evaluated_.size());
      std::vector<std::vector<double>> children = Offspring(population, want);
      if (children.empty()) break;
      std::vector<Individual> kids = EvaluateAll(children);
      population.insert(population.end(), kids.begin(), kids.end());
      population = Survivors(std::move(population), n);
    }
    return std::move(evaluated_);
  }

 private:
  std::vector<double> RandomPoint() {
    std::vector<double> g(space_.dimension());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const ParamBound& b = space_.params[i];
      if (b.integer) {
        std::uniform_int_distribution<long long> d(static_cast<long long>(b.lo),
                                                   static_cast<long long>(b.hi));
        g[i] = static_cast<double>(d(rng_));
      } else {
        std::uniform_real_distribution<double> d(b.lo, b.hi);
        g[i] = d(rng_);
      }
    }
    return space_.Normalize(std::move(g));
  }

  bool Taken(const std::vector<double>& g,
             const std::set<std::vector<double>>& pending) const {
    return seen_.count(g) != 0 || pending.count(g) != 0;
  }

  std::optional<std::vector<double>> UnseenRandom(
      const std::set<std::vector<double>>& pending) {
    if (enumerable_) {
      std::vector<std::vector<double>> free;
      std::vector<double> g(space_.dimension());
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = space_.params[i].lo;
      for (;;) {
        if (!Taken(g, pending)) free.push_back(g);
        std::size_t i = 0;
        for (; i < g.size(); ++i) {
          if (g[i] < space_.params[i].hi) {
            g[i] += 1.0;
            break;
          }
          g[i] = space_.params[i].lo;
        }
        if (i == g.size()) break;
      }
      if (free.empty()) return std::nullopt;
      std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
      return free[pick(rng_)];
    }
    for (int t = 0; t < kRandomTries; ++t) {
      std::vector<double> g = RandomPoint();
      if (!Taken(g, pending)) return g;
    }
    return std::nullopt;
  }

  const Individual& Tournament(const std::vector<Individual>& pop) {
    std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
    const Individual& a = pop[pick(rng_)];
    const Individual& b = pop[pick(rng_)];
    if (a.rank != b.rank) return a.rank < b.rank ? a : b;
    if (a.crowding != b.crowding) return a.crowding > b.crowding ? a : b;
    return a.evaluation <= b.evaluation ? a : b;
  }

  void Crossover(std::vector<double>& x, std::vector<double>& y) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    if (u01(rng_) > kCrossoverProb) return;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (u01(rng_) > 0.5) continue;
      const double lo = OpLo(space_.params[i]);
      const double hi = OpHi(space_.params[i]);
      double a = std::min(x[i], y[i]);
      double b = std::max(x[i], y[i]);
      if (b - a < 1e-14) continue;
      const double u = u01(rng_);
      auto spread = [&](double beta) {
        const double alpha = 2.0 - std::pow(beta, -(kSbxEta + 1.0));
        const double q = u <= 1.0 / alpha
                             ? std::pow(u * alpha, 1.0 / (kSbxEta + 1.0))
                             : std::pow(1.0 / (2.0 - u * alpha),
                                        1.0 / (kSbxEta + 1.0));
        return q;
      };
      const double q1 = spread(1.0 + 2.0 * (a - lo) / (b - a));
      const double q2 = spread(1.0 + 2.0 * (hi - b) / (b - a));
      double c1 = std::clamp(0.5 * ((a + b) - q1 * (b - a)), lo, hi);
      double c2 = std::clamp(0.5 * ((a + b) + q2 * (b - a)), lo, hi);
      if (u01(rng_) < 0.5) std::swap(c1, c2);
      x[i] = c1;
      y[i] = c2;
    }
  }

  // Bounded polynomial mutation of gene i.
  double PolyMutate(std::size_t i, double v) {
    const double lo = OpLo(space_.params[i]);
    const double hi = OpHi(space_.params[i]);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double x = std::clamp(v, lo, hi);
    const double d1 = (x - lo) / (hi - lo);
    const double d2 = (hi - x) / (hi - lo);
    const double u = u01(rng_);
    const double m = 1.0 / (kMutationEta + 1.0);
    double dq;
    if (u < 0.5) {
      const double val =
          2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, kMutationEta + 1.0);
      dq = std::pow(val, m) - 1.0;
    } else {
      const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) *
                                               std::pow(1.0 - d2, kMutationEta + 1.0);
      dq = 1.0 - std::pow(val, m);
    }
    return std::clamp(x + dq * (hi - lo), lo, hi);
  }

  void Mutate(std::vector<double>& x) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double prob = 1.0 / static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      if (u01(rng_) <= prob) x[i] = PolyMutate(i, x[i]);
  }

  std::vector<std::vector<double>> Offspring(const std::vector<Individual>& pop,
                                             std::size_t want) {
    std::vector<std::vector<double>> out;
    std::set<std::vector<double>> pending;
    auto admit = [&](std::vector<double> raw) {
      std::vector<double> g = space_.Normalize(raw);
      for (int t = 0; t < kRemutateTries && Taken(g, pending); ++t) {
        // Every re-mutation moves at least one gene.
        std::uniform_int_distribution<std::size_t> pick(0, raw.size() - 1);
        const std::size_t forced = pick(rng_);
        Mutate(raw);
        raw[forced] = PolyMutate(forced, raw[forced]);
        g = space_.Normalize(raw);
      }
      if (Taken(g, pending)) {
        auto fresh = UnseenRandom(pending);
        if (!fresh) return false;
        g = std::move(*fresh);
      }
      pending.insert(g);
      out.push_back(std::move(g));
      return true;
    };
    while (out.size() < want) {
      std::vector<double> x = Tournament(pop).genes;
      std::vector<double> y = Tournament(pop).genes;
      Crossover(x, y);
      Mutate(x);
      Mutate(y);
      if (!admit(std::move(x))) break;
      if (out.size() < want && !admit(std::move(y))) break;
    }
    return out;
  }

  std::vector<Individual> EvaluateAll(
      const std::vector<std::vector<double>>& genes) {
    std::vector<Individual> out(genes.size());
    const std::size_t threads =
        std::max<std::size_t>(1, std::min(options_.threads, genes.size()));
    auto work = [&](std::size_t t) {
      for (std::size_t i = t; i < genes.size(); i += threads)
        out[i] = Evaluate(kind_, space_, genes[i], stream_, engine_);
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::exception_ptr> errors(threads);
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
          try {
            work(t);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
      for (std::thread& th : pool) th.join();
      for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    }
    for (Individual& ind : out) {
      ind.evaluation = evaluated_.size();
      seen_.insert(ind.genes);
      evaluated_.push_back(ind);
      if (options_.on_evaluation) options_.on_evaluation(ind);
    }
    return out;
  }

  static void RankAndCrowd(std::vector<Individual>& pop) {
    std::vector<Objectives> objs;
    std::vector<double> viol;
    for (const Individual& ind : pop) {
      objs.push_back(ind.objectives);
      viol.push_back(static_cast<double>(ind.undetected));
    }
    const auto fronts = NondominatedSort(objs, viol);
    for (std::size_t r = 0; r < fronts.size(); ++r) {
      std::vector<Objectives> f;
      for (std::size_t i : fronts[r]) f.push_back(objs[i]);
      const std::vector<double> cd = CrowdingDistance(f);
      for (std::size_t k = 0; k < fronts[r].size(); ++k) {
        pop[fronts[r][k]].rank = r;
        pop[fronts[r][k]].crowding = cd[k];
      }
    }
  }

  static std::vector<Individual> Survivors(std::vector<Individual> pop,
                                           std::size_t n) {
    RankAndCrowd(pop);
    std::stable_sort(pop.begin(), pop.end(),
                     [](const Individual& a, const Individual& b) {
                       if (a.rank != b.rank) return a.rank < b.rank;
                       if (a.crowding != b.crowding) return a.crowding > b.crowding;
                       return a.evaluation < b.evaluation;
                     });
    if (pop.size() > n) pop.resize(n);
    RankAndCrowd(pop);
    return pop;
  }

  StrategyKind kind_;
  const ParamSpace& space_;
  const CommitStream& stream_;
  const EngineConfig& engine_;
  TuneBudget budget_;
  const TuneOptions& options_;
  std::mt19937_64 rng_;
  bool enumerable_ = false;
  std::set<std::vector<double>> seen_;
  std::vector<Individual> evaluated_;
};

}  // namespace

TuneResult Tune(StrategyKind kind, const ParamSpace& space,
                const CommitStream& eval_stream, const EngineConfig& engine,
                const TuneBudget& budget, const TuneOptions& options) {
  space.Validate();
  budget.Validate();
  engine.Validate();
  TuneResult result;
  result.kind = kind;
  result.space = space;
  result.evaluated =
      Nsga2(kind, space, eval_stream, engine, budget, options).Run();

  std::vector<Objectives> objs;
  for (const Individual& ind : result.evaluated) objs.push_back(ind.objectives);
  const auto fronts = NondominatedSort(objs);
  if (!fronts.empty()) {
    std::vector<std::size_t> first = fronts.front();
    std::sort(first.begin(), first.end(), [&](std::size_t a, std::size_t b) {
      if (objs[a].total_tests != objs[b].total_tests)
        return objs[a].total_tests < objs[b].total_tests;
      return result.evaluated[a].evaluation < result.evaluated[b].evaluation;
    });
    std::vector<Objectives> f;
    for (std::size_t i : first) f.push_back(objs[i]);
    const std::vector<double> cd = CrowdingDistance(f);
    for (std::size_t k = 0; k < first.size(); ++k) {
      Individual ind = result.evaluated[first[k]];
      ind.rank = 0;
      ind.crowding = cd[k];
      result.front.push_back(std::move(ind));
    }
  }
  result.chosen = SelectChosen(result.evaluated, options.ttc_bound);
  result.chosen_config = space.Apply(kind, result.chosen.genes);
  return result;
}

SimulationReport Replay(const StrategyConfig& config,
                        const CommitStream& test_stream,
                        const EngineConfig& engine, double rate) {
  const SimulationResult result = RunSimulation(test_stream, config, engine);
  return Summarize(config.kind.Name(), result, test_stream, rate);
}

nlohmann::json StrategyConfigToJson(const StrategyConfig& config) {
  nlohmann::json j;
  j["kind"] = config.kind.Name();
  if (config.window_hours) j["window_hours"] = *config.window_hours;
  if (config.batch_size) j["batch_size"] = *config.batch_size;
  if (config.threshold) j["threshold"] = *config.threshold;
  if (config.aging_rate) j["aging_rate"] = *config.aging_rate;
  if (config.high_risk_trigger)
    j["high_risk_trigger"] = *config.high_risk_trigger;
  return j;
}

StrategyConfig StrategyConfigFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("strategy entry must be an object");
  if (!j.contains("kind") || !j.at("kind").is_string())
    throw ConfigError("strategy entry needs a string 'kind'");
  StrategyConfig config;
  config.kind = StrategyKind::Parse(j.at("kind").get<std::string>());
  auto number = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key)) return std::nullopt;
    if (!j.at(key).is_number())
      throw ConfigError(std::string("strategy parameter '") + key +
                        "' must be a number");
    return j.at(key).get<double>();
  };
  config.window_hours = number("window_hours");
  config.threshold = number("threshold");
  config.aging_rate = number("aging_rate");
  config.high_risk_trigger = number("high_risk_trigger");
  if (auto size = number("batch_size")) {
    if (*size != std::floor(*size))
      throw ConfigError("strategy parameter 'batch_size' must be an integer");
    config.batch_size = static_cast<int>(*size);
  }
  for (const auto& [key, value] : j.items()) {
    if (key == "kind" || key == "name" || KnownParam(key)) continue;
    throw ConfigError("unknown strategy parameter '" + key + "'");
  }
  config.Validate();
  return config;
}

namespace {

nlohmann::json IndividualToJson(const Individual& ind, const ParamSpace& space) {
  nlohmann::json j;
  nlohmann::json params;
  for (std::size_t i = 0; i < ind.genes.size(); ++i) {
    if (space.params[i].integer) {
      params[space.params[i].name] = std::llround(ind.genes[i]);
    } else {
      params[space.params[i].name] = ind.genes[i];
    }
  }
  j["params"] = std::move(params);
  j["total_tests"] = ind.objectives.total_tests;
  j["max_ttc_hours"] = ind.objectives.max_ttc_hours;
  j["mean_feedback_hours"] = ind.mean_feedback_hours;
  j["mean_ttc_hours"] = ind.mean_ttc_hours ? nlohmann::json(*ind.mean_ttc_hours)
                                           : nlohmann::json(nullptr);
  j["undetected_regressors"] = ind.undetected;
  j["feasible"] = ind.feasible();
  j["evaluation"] = ind.evaluation;
  return j;
}

}  // namespace

nlohmann::json TuneResultToJson(const TuneResult& result) {
  nlohmann::json j;
  j["kind"] = result.kind.Name();
  nlohmann::json space = nlohmann::json::array();
  for (const ParamBound& b : result.space.params)
    space.push_back(
        {{"name", b.name}, {"lo", b.lo}, {"hi", b.hi}, {"integer", b.integer}});
  j["space"] = std::move(space);
  j["evaluations"] = result.evaluated.size();
  nlohmann::json front = nlohmann::json::array();
  for (const Individual& ind : result.front)
    front.push_back(IndividualToJson(ind, result.space));
  j["front"] = std::move(front);
  j["chosen"] = IndividualToJson(result.chosen, result.space);
  j["chosen_config"] = StrategyConfigToJson(result.chosen_config);
  return j;
}

}  // namespace riskbatch
