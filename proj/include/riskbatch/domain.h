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

// Core data model: commits, signature-groups and validated commit streams.
//
// The simulation clock is integer seconds since the stream epoch. Catalog
// durations are given in minutes and TWSB cadences in hours; both are
// converted to whole seconds once, here, so every component agrees on them.

#ifndef RISKBATCH_DOMAIN_H_
#define RISKBATCH_DOMAIN_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace riskbatch {

using Time = std::int64_t;
using CommitIndex = std::size_t;
using GroupIndex = std::uint32_t;

inline constexpr Time kSecondsPerMinute = 60;
inline constexpr Time kSecondsPerHour = 3600;

// Rounds to the nearest whole second.
Time MinutesToSeconds(double minutes);
Time HoursToSeconds(double hours);
inline double SecondsToHours(Time seconds) {
  return static_cast<double>(seconds) / kSecondsPerHour;
}

enum class Platform { kAndroid, kWindows, kLinux, kMacOS };

inline constexpr std::array<Platform, 4> kAllPlatforms = {
    Platform::kAndroid, Platform::kWindows, Platform::kLinux,
    Platform::kMacOS};

std::string_view PlatformName(Platform platform);
// Accepts the canonical names case-insensitively ("Android", "Windows",
// "Linux", "MacOS"). Throws ValidationError otherwise.
Platform ParsePlatform(std::string_view name);

struct SignatureGroup {
  std::string id;
  Platform platform = Platform::kLinux;
  double duration_min = 20.0;
  // Optional per-group cadence used by the TWSB baseline.
  std::optional<double> period_hours;
  std::optional<double> phase_hours;

  Time DurationSeconds() const { return MinutesToSeconds(duration_min); }

  bool operator==(const SignatureGroup&) const = default;
};

struct Commit {
  std::string id;
  Time land_time = 0;
  double risk = 0.0;
  int label = 0;
  std::vector<std::string> failing_groups;
  std::vector<std::string> selected_groups;

  bool operator==(const Commit&) const = default;
};

// A validated, immutable, time-ordered commit stream plus its catalog.
//
// Construction canonicalizes group-id lists (sorted, deduplicated) and sorts
// the catalog by id; group indices refer to that sorted order.
class CommitStream {
 public:
  CommitStream() = default;
  // Throws ValidationError on any invariant violation.
  CommitStream(std::vector<Commit> commits, std::vector<SignatureGroup> catalog);

  const std::vector<Commit>& commits() const { return commits_; }
  const std::vector<SignatureGroup>& catalog() const { return catalog_; }
  std::size_t size() const { return commits_.size(); }
  bool empty() const { return commits_.empty(); }
  std::size_t group_count() const { return catalog_.size(); }
  const Commit& operator[](CommitIndex i) const { return commits_[i]; }
  const SignatureGroup& group(GroupIndex g) const { return catalog_[g]; }

  std::optional<GroupIndex> FindGroup(std::string_view id) const;
  std::span<const GroupIndex> failing(CommitIndex i) const {
    return failing_idx_[i];
  }
  std::span<const GroupIndex> selected(CommitIndex i) const {
    return selected_idx_[i];
  }
  // Land time of the last commit; 0 for an empty stream.
  Time stream_end() const;

  // Commits [begin, end) with the same catalog.
  CommitStream Slice(std::size_t begin, std::size_t end) const;

  bool operator==(const CommitStream& other) const {
    return commits_ == other.commits_ && catalog_ == other.catalog_;
  }

 private:
  std::vector<Commit> commits_;
  std::vector<SignatureGroup> catalog_;
  std::unordered_map<std::string, GroupIndex> group_by_id_;
  std::vector<std::vector<GroupIndex>> failing_idx_;
  std::vector<std::vector<GroupIndex>> selected_idx_;
};

struct SplitSpec {
  double train_frac = 0.65;
  double eval_frac = 0.10;
  double test_frac = 0.25;

  // Throws ValidationError unless all fractions are positive and sum to 1.
  void Validate() const;
};

struct StreamSplits {
  CommitStream train;
  CommitStream eval;
  CommitStream test;
};

// Contiguous chronological partition with cumulative floor() boundaries;
// the rounding remainder lands in the test part.
StreamSplits ChronologicalSplit(const CommitStream& stream,
                                const SplitSpec& spec);

// Catalog: a JSON array of {id, platform, duration_min[, period_hours,
// phase_hours]} objects.
std::vector<SignatureGroup> LoadCatalog(const std::filesystem::path& path);
void SaveCatalog(const std::filesystem::path& path,
                 std::span<const SignatureGroup> catalog);

// Commit stream: JSON Lines with keys id, land_time, risk, label,
// failing_groups, selected_groups. Blank lines are skipped.
CommitStream LoadStream(const std::filesystem::path& stream_path,
                        std::vector<SignatureGroup> catalog);
CommitStream LoadStream(const std::filesystem::path& stream_path,
                        const std::filesystem::path& catalog_path);
void SaveStream(const std::filesystem::path& path, const CommitStream& stream);

// Text-level variants used by the file loaders; `source` names the input in
// error messages.
CommitStream ParseStream(std::string_view jsonl,
                         std::vector<SignatureGroup> catalog,
                         std::string_view source = "<stream>");
std::string SerializeStream(const CommitStream& stream);
std::vector<SignatureGroup> ParseCatalog(std::string_view json,
                                         std::string_view source = "<catalog>");
std::string SerializeCatalog(std::span<const SignatureGroup> catalog);

}  // namespace riskbatch

#endif  // RISKBATCH_DOMAIN_H_
