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

#include "riskbatch/streamgen.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <boost/math/distributions/beta.hpp>

#include "riskbatch/errors.h"

namespace riskbatch {
namespace {

constexpr double kCleanAlpha = 2.0;
constexpr double kCleanBeta = 8.0;

double RegressorAlpha(double q) { return kCleanAlpha + q; }
double RegressorBeta(double q) { return kCleanBeta - std::min(q, 6.0); }

// Independent engine per component, derived from the top-level seed.
std::mt19937_64 Substream(std::uint64_t seed, std::uint64_t component) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(component)};
  return std::mt19937_64(seq);
}

double SampleBeta(std::mt19937_64& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

std::string PaddedId(std::string_view prefix, std::size_t i, int width) {
  std::string digits = std::to_string(i);
  if (static_cast<int>(digits.size()) < width)
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return std::string(prefix) + digits;
}

int Digits(std::size_t n) {
  int d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return d;
}

}  // namespace

void GenSpec::Validate() const {
  if (n_commits == 0) throw ConfigError("n_commits must be positive");
  if (!(mean_interarrival_minutes > 0.0))
    throw ConfigError("mean_interarrival_minutes must be positive");
  if (!(positive_rate > 0.0 && positive_rate < 1.0))
    throw ConfigError("positive_rate must be in (0, 1)");
  if (!(risk_quality >= 0.0) || !std::isfinite(risk_quality))
    throw ConfigError("risk_quality must be non-negative");
  int total = 0;
  for (int n : groups_per_platform) {
    if (n < 0) throw ConfigError("groups per platform must be non-negative");
    total += n;
  }
  if (total <= 0) throw ConfigError("at least one signature-group is required");
  if (!(group_duration_minutes > 0.0))
    throw ConfigError("group_duration_minutes must be positive");
  if (!(min_period_hours > 0.0) || !(max_period_hours >= min_period_hours))
    throw ConfigError("selection periods need 0 < min <= max");
  if (min_failing_groups < 1 || max_failing_groups < min_failing_groups)
    throw ConfigError("failing group counts need 1 <= min <= max");
  if (target_auc && !(*target_auc >= 0.5 && *target_auc <= 0.999))
    throw ConfigError("target_auc must be in [0.5, 0.999]");
}

double PopulationAuc(double q) {
  if (!(q >= 0.0)) throw ConfigError("risk quality must be non-negative");
  const boost::math::beta_distribution<double> clean(kCleanAlpha, kCleanBeta);
  const boost::math::beta_distribution<double> reg(RegressorAlpha(q),
                                                   RegressorBeta(q));
  // Composite Simpson on a density that vanishes at both ends.
  constexpr int kIntervals = 4000;
  const double h = 1.0 / kIntervals;
  double sum = 0.0;
  for (int k = 1; k < kIntervals; ++k) {
    const double x = k * h;
    const double w = (k % 2 == 1) ? 4.0 : 2.0;
    sum += w * boost::math::pdf(reg, x) * boost::math::cdf(clean, x);
  }
  return sum * h / 3.0;
}

double CalibrateRiskQuality(double target) {
  if (!(target >= 0.5 && target <= 0.999))
    throw ConfigError("target AUC must be in [0.5, 0.999]");
  double lo = 0.0;
  if (PopulationAuc(lo) >= target) return lo;
  double hi = 1.0;
  while (PopulationAuc(hi) < target) hi *= 2.0;
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (PopulationAuc(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

std::optional<double> EmpiricalAuc(const CommitStream& stream) {
  std::vector<std::pair<double, int>> scored;
  std::size_t pos = 0;
  for (const Commit& c : stream.commits()) {
    scored.emplace_back(c.risk, c.label);
    pos += c.label;
  }
  const std::size_t neg = scored.size() - pos;
  if (pos == 0 || neg == 0) return std::nullopt;
  std::sort(scored.begin(), scored.end());
  // Sum of positive ranks with midranks for ties.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < scored.size();) {
    std::size_t j = i;
    while (j < scored.size() && scored[j].first == scored[i].first) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (scored[k].second == 1) rank_sum += mid;
    i = j;
  }
  const double p = static_cast<double>(pos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

CommitStream Generate(const GenSpec& spec) {
  spec.Validate();
  const double q =
      spec.target_auc ? CalibrateRiskQuality(*spec.target_auc) : spec.risk_quality;

  std::mt19937_64 catalog_rng = Substream(spec.seed, 1);
  std::mt19937_64 arrival_rng = Substream(spec.seed, 2);
  std::mt19937_64 label_rng = Substream(spec.seed, 3);

  std::vector<SignatureGroup> catalog;
  std::vector<Time> period;
  std::vector<Time> phase;
  const Time min_period = std::max<Time>(1, HoursToSeconds(spec.min_period_hours));
  const Time max_period =
      std::max<Time>(min_period, HoursToSeconds(spec.max_period_hours));
  for (Platform p : kAllPlatforms) {
    const int count = spec.groups_per_platform[static_cast<std::size_t>(p)];
    std::string prefix(PlatformName(p));
    for (char& ch : prefix) ch = static_cast<char>(std::tolower(ch));
    for (int k = 0; k < count; ++k) {
      std::uniform_int_distribution<Time> pd(min_period, max_period);
      const Time per = pd(catalog_rng);
      std::uniform_int_distribution<Time> ph(0, per - 1);
      const Time pha = ph(catalog_rng);
      SignatureGroup g;
      g.id = PaddedId(prefix + "-", static_cast<std::size_t>(k), 2);
      g.platform = p;
      g.duration_min = spec.group_duration_minutes;
      g.period_hours = static_cast<double>(per) / kSecondsPerHour;
      g.phase_hours = static_cast<double>(pha) / kSecondsPerHour;
      catalog.push_back(g);
    }
  }
  std::sort(catalog.begin(), catalog.end(),
            [](const SignatureGroup& a, const SignatureGroup& b) {
              return a.id < b.id;
            });
  for (const SignatureGroup& g : catalog) {
    period.push_back(HoursToSeconds(*g.period_hours));
    phase.push_back(HoursToSeconds(*g.phase_hours));
  }

  const std::size_t n = spec.n_commits;
  std::vector<Time> land(n, 0);
  std::exponential_distribution<double> gap(1.0 /
                                            (spec.mean_interarrival_minutes * 60.0));
  for (std::size_t i = 1; i < n; ++i)
    land[i] = land[i - 1] + static_cast<Time>(std::llround(gap(arrival_rng)));

  const int width = Digits(n - 1) < 6 ? 6 : Digits(n - 1);
  const std::size_t groups = catalog.size();
  std::bernoulli_distribution is_regressor(spec.positive_rate);
  std::uniform_int_distribution<int> fail_count(
      spec.min_failing_groups,
      std::min<int>(spec.max_failing_groups, static_cast<int>(groups)));
  std::vector<Commit> commits(n);
  std::vector<std::size_t> pool(groups);
  for (std::size_t i = 0; i < n; ++i) {
    Commit& c = commits[i];
    c.id = PaddedId("c", i, width);
    c.land_time = land[i];
    c.label = is_regressor(label_rng) ? 1 : 0;
    if (c.label == 1) {
      c.risk = SampleBeta(label_rng, RegressorAlpha(q), RegressorBeta(q));
      const int k = fail_count(label_rng);
      std::iota(pool.begin(), pool.end(), 0);
      for (int j = 0; j < k; ++j) {
        std::uniform_int_distribution<std::size_t> pick(j, groups - 1);
        std::swap(pool[static_cast<std::size_t>(j)], pool[pick(label_rng)]);
        c.failing_groups.push_back(catalog[pool[static_cast<std::size_t>(j)]].id);
      }
    } else {
      c.risk = SampleBeta(label_rng, kCleanAlpha, kCleanBeta);
    }
  }

  // Commit i is selected for g when a run of g falls in [t_i, t_{i+1}).
  for (std::size_t g = 0; g < groups; ++g) {
    auto first_run_at_or_after = [&](Time t) {
      if (t <= phase[g]) return phase[g];
      const Time k = (t - phase[g] + period[g] - 1) / period[g];
      return phase[g] + k * period[g];
    };
    for (std::size_t i = 0; i < n; ++i) {
      const bool selected =
          i + 1 == n || first_run_at_or_after(land[i]) < land[i + 1];
      if (selected) commits[i].selected_groups.push_back(catalog[g].id);
    }
  }
  return CommitStream(std::move(commits), std::move(catalog));
}

nlohmann::json TruthSidecar(const CommitStream& stream, const GenSpec& spec) {
  nlohmann::json j;
  j["seed"] = spec.seed;
  j["n_commits"] = stream.size();
  j["positive_rate"] = spec.positive_rate;
  j["risk_quality"] =
      spec.target_auc ? CalibrateRiskQuality(*spec.target_auc) : spec.risk_quality;
  const std::optional<double> auc = EmpiricalAuc(stream);
  j["empirical_auc"] = auc ? nlohmann::json(*auc) : nlohmann::json(nullptr);
  nlohmann::json regressors = nlohmann::json::array();
  for (const Commit& c : stream.commits())
    if (c.label == 1)
      regressors.push_back({{"id", c.id}, {"failing_groups", c.failing_groups}});
  j["regressors"] = std::move(regressors);
  return j;
}

}  // namespace riskbatch
