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

#include "riskbatch/domain.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "riskbatch/errors.h"

namespace riskbatch {
namespace {

using nlohmann::json;

void Canonicalize(std::vector<std::string>& ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

std::vector<std::string> StringArray(const json& value, const char* key) {
  if (!value.contains(key)) return {};
  const json& arr = value.at(key);
  if (!arr.is_array()) throw std::invalid_argument(std::string(key) + " must be an array");
  std::vector<std::string> out;
  out.reserve(arr.size());
  for (const json& item : arr) {
    if (!item.is_string())
      throw std::invalid_argument(std::string(key) + " must hold strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

const json& Required(const json& value, const char* key) {
  auto it = value.find(key);
  if (it == value.end())
    throw std::invalid_argument(std::string("missing key '") + key + "'");
  return *it;
}

Commit CommitFromJson(const json& value) {
  if (!value.is_object()) throw std::invalid_argument("expected a JSON object");
  Commit c;
  const json& id = Required(value, "id");
  if (!id.is_string()) throw std::invalid_argument("id must be a string");
  c.id = id.get<std::string>();
  const json& land = Required(value, "land_time");
  if (!land.is_number_integer())
    throw std::invalid_argument("land_time must be an integer");
  c.land_time = land.get<Time>();
  const json& risk = Required(value, "risk");
  if (!risk.is_number()) throw std::invalid_argument("risk must be a number");
  c.risk = risk.get<double>();
  const json& label = Required(value, "label");
  if (!label.is_number_integer())
    throw std::invalid_argument("label must be an integer");
  c.label = label.get<int>();
  c.failing_groups = StringArray(value, "failing_groups");
  c.selected_groups = StringArray(value, "selected_groups");
  return c;
}

json CommitToJson(const Commit& c) {
  return json{{"id", c.id},
              {"land_time", c.land_time},
              {"risk", c.risk},
              {"label", c.label},
              {"failing_groups", c.failing_groups},
              {"selected_groups", c.selected_groups}};
}

}  // namespace

Time MinutesToSeconds(double minutes) {
  return static_cast<Time>(std::llround(minutes * kSecondsPerMinute));
}

Time HoursToSeconds(double hours) {
  return static_cast<Time>(std::llround(hours * kSecondsPerHour));
}

std::string_view PlatformName(Platform platform) {
  switch (platform) {
    case Platform::kAndroid:
      return "Android";
    case Platform::kWindows:
      return "Windows";
    case Platform::kLinux:
      return "Linux";
    case Platform::kMacOS:
      return "MacOS";
  }
  return "?";
}

Platform ParsePlatform(std::string_view name) {
  std::string lower(name);
  for (char& ch : lower) ch = static_cast<char>(std::tolower(ch));
  for (Platform p : kAllPlatforms) {
    std::string canonical(PlatformName(p));
    for (char& ch : canonical) ch = static_cast<char>(std::tolower(ch));
    if (canonical == lower) return p;
  }
  throw ValidationError("unknown platform '" + std::string(name) +
                        "' (expected Android, Windows, Linux or MacOS)");
}

CommitStream::CommitStream(std::vector<Commit> commits,
                           std::vector<SignatureGroup> catalog)
    : commits_(std::move(commits)), catalog_(std::move(catalog)) {
  std::sort(catalog_.begin(), catalog_.end(),
            [](const SignatureGroup& a, const SignatureGroup& b) {
              return a.id < b.id;
            });
  for (std::size_t g = 0; g < catalog_.size(); ++g) {
    const SignatureGroup& group = catalog_[g];
    if (group.id.empty()) throw ValidationError("catalog entry with empty id");
    if (!(group.duration_min > 0.0) || group.DurationSeconds() <= 0)
      throw ValidationError("group " + group.id +
                            ": duration_min must be positive");
    if (group.period_hours && !(*group.period_hours > 0.0))
      throw ValidationError("group " + group.id +
                            ": period_hours must be positive");
    if (group.phase_hours && !(*group.phase_hours >= 0.0))
      throw ValidationError("group " + group.id +
                            ": phase_hours must be non-negative");
    if (!group_by_id_.emplace(group.id, static_cast<GroupIndex>(g)).second)
      throw ValidationError("duplicate group id " + group.id);
  }

  std::unordered_map<std::string_view, CommitIndex> seen_ids;
  failing_idx_.resize(commits_.size());
  selected_idx_.resize(commits_.size());
  auto resolve = [this](const Commit& c, const std::vector<std::string>& ids,
                        std::vector<GroupIndex>& out) {
    out.reserve(ids.size());
    for (const std::string& id : ids) {
      auto g = FindGroup(id);
      if (!g)
        throw ValidationError("commit " + c.id +
                              ": unknown signature-group '" + id + "'");
      out.push_back(*g);
    }
  };
  for (CommitIndex i = 0; i < commits_.size(); ++i) {
    Commit& c = commits_[i];
    if (c.id.empty()) throw ValidationError("commit with empty id at position " +
                                            std::to_string(i));
    if (!seen_ids.emplace(c.id, i).second)
      throw ValidationError("duplicate commit id " + c.id);
    if (!(c.risk >= 0.0 && c.risk <= 1.0))
      throw ValidationError("commit " + c.id + ": risk " +
                            std::to_string(c.risk) + " outside [0, 1]");
    if (c.label != 0 && c.label != 1)
      throw ValidationError("commit " + c.id + ": label must be 0 or 1");
    if (c.land_time < 0)
      throw ValidationError("commit " + c.id + ": negative land_time");
    if (i > 0 && c.land_time < commits_[i - 1].land_time)
      throw ValidationError("commit " + c.id +
                            ": land_time is earlier than its predecessor " +
                            commits_[i - 1].id);
    Canonicalize(c.failing_groups);
    Canonicalize(c.selected_groups);
    if ((c.label == 1) != !c.failing_groups.empty())
      throw ValidationError("commit " + c.id +
                            ": label must be 1 exactly when failing_groups is "
                            "non-empty");
    resolve(c, c.failing_groups, failing_idx_[i]);
    resolve(c, c.selected_groups, selected_idx_[i]);
  }
}

std::optional<GroupIndex> CommitStream::FindGroup(std::string_view id) const {
  auto it = group_by_id_.find(std::string(id));
  if (it == group_by_id_.end()) return std::nullopt;
  return it->second;
}

Time CommitStream::stream_end() const {
  return commits_.empty() ? 0 : commits_.back().land_time;
}

CommitStream CommitStream::Slice(std::size_t begin, std::size_t end) const {
  end = std::min(end, commits_.size());
  begin = std::min(begin, end);
  CommitStream out;
  out.commits_.assign(commits_.begin() + begin, commits_.begin() + end);
  out.catalog_ = catalog_;
  out.group_by_id_ = group_by_id_;
  out.failing_idx_.assign(failing_idx_.begin() + begin,
                          failing_idx_.begin() + end);
  out.selected_idx_.assign(selected_idx_.begin() + begin,
                           selected_idx_.begin() + end);
  return out;
}

void SplitSpec::Validate() const {
  if (!(train_frac > 0 && eval_frac > 0 && test_frac > 0))
    throw ValidationError("split fractions must be positive");
  if (std::abs(train_frac + eval_frac + test_frac - 1.0) > 1e-9)
    throw ValidationError("split fractions must sum to 1");
}

StreamSplits ChronologicalSplit(const CommitStream& stream,
                                const SplitSpec& spec) {
  spec.Validate();
  if (stream.empty()) throw ValidationError("cannot split an empty stream");
  const double n = static_cast<double>(stream.size());
  // The epsilon absorbs representation error such as 0.65 * 100 < 65.
  auto boundary = [n](double frac) {
    return static_cast<std::size_t>(std::floor(n * frac + 1e-9));
  };
  const std::size_t b1 = std::min(boundary(spec.train_frac), stream.size());
  const std::size_t b2 = std::clamp(
      boundary(spec.train_frac + spec.eval_frac), b1, stream.size());
  return StreamSplits{stream.Slice(0, b1), stream.Slice(b1, b2),
                      stream.Slice(b2, stream.size())};
}

std::vector<SignatureGroup> ParseCatalog(std::string_view text,
                                         std::string_view source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(source) + ": " + e.what());
  }
  if (!doc.is_array())
    throw ParseError(std::string(source) + ": catalog must be a JSON array");
  std::vector<SignatureGroup> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& entry = doc[i];
    const std::string where =
        std::string(source) + ": entry " + std::to_string(i) + ": ";
    try {
      if (!entry.is_object()) throw std::invalid_argument("expected an object");
      SignatureGroup g;
      const json& id = Required(entry, "id");
      if (!id.is_string()) throw std::invalid_argument("id must be a string");
      g.id = id.get<std::string>();
      const json& platform = Required(entry, "platform");
      if (!platform.is_string())
        throw std::invalid_argument("platform must be a string");
      g.platform = ParsePlatform(platform.get<std::string>());
      const json& duration = Required(entry, "duration_min");
      if (!duration.is_number())
        throw std::invalid_argument("duration_min must be a number");
      g.duration_min = duration.get<double>();
      if (entry.contains("period_hours"))
        g.period_hours = entry.at("period_hours").get<double>();
      if (entry.contains("phase_hours"))
        g.phase_hours = entry.at("phase_hours").get<double>();
      out.push_back(std::move(g));
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    } catch (const std::exception& e) {
      throw ParseError(where + e.what());
    }
  }
  return out;
}

std::string SerializeCatalog(std::span<const SignatureGroup> catalog) {
  json doc = json::array();
  for (const SignatureGroup& g : catalog) {
    json entry{{"id", g.id},
               {"platform", std::string(PlatformName(g.platform))},
               {"duration_min", g.duration_min}};
    if (g.period_hours) entry["period_hours"] = *g.period_hours;
    if (g.phase_hours) entry["phase_hours"] = *g.phase_hours;
    doc.push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

CommitStream ParseStream(std::string_view text,
                         std::vector<SignatureGroup> catalog,
                         std::string_view source) {
  std::vector<Commit> commits;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (eol == text.size()) break;
      continue;
    }
    try {
      commits.push_back(CommitFromJson(json::parse(line)));
    } catch (const std::exception& e) {
      throw ParseError(std::string(source) + ":" + std::to_string(line_no) +
                       ": " + e.what());
    }
    if (eol == text.size()) break;
  }
  return CommitStream(std::move(commits), std::move(catalog));
}

std::string SerializeStream(const CommitStream& stream) {
  std::string out;
  for (const Commit& c : stream.commits()) {
    out += CommitToJson(c).dump();
    out += '\n';
  }
  return out;
}

std::vector<SignatureGroup> LoadCatalog(const std::filesystem::path& path) {
  return ParseCatalog(ReadFile(path), path.string());
}

void SaveCatalog(const std::filesystem::path& path,
                 std::span<const SignatureGroup> catalog) {
  WriteFile(path, SerializeCatalog(catalog));
}

CommitStream LoadStream(const std::filesystem::path& stream_path,
                        std::vector<SignatureGroup> catalog) {
  return ParseStream(ReadFile(stream_path), std::move(catalog),
                     stream_path.string());
}

CommitStream LoadStream(const std::filesystem::path& stream_path,
                        const std::filesystem::path& catalog_path) {
  return LoadStream(stream_path, LoadCatalog(catalog_path));
}

void SaveStream(const std::filesystem::path& path, const CommitStream& stream) {
  WriteFile(path, SerializeStream(stream));
}

}  // namespace riskbatch
