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

#include "riskbatch/resolver.h"

#include <algorithm>
#include <utility>

#include "riskbatch/errors.h"

namespace riskbatch {

GroupLedger::GroupLedger(const CommitStream& stream)
    : clean_upto_(stream.group_count(), 0),
      regressors_(stream.group_count()),
      identified_(stream.size(), 0) {
  for (CommitIndex i = 0; i < stream.size(); ++i)
    for (GroupIndex g : stream.failing(i)) regressors_[g].push_back(i);
}

void GroupLedger::MarkClean(GroupIndex g, CommitIndex through) {
  if (auto live = EarliestLive(g, {0, through + 1}))
    throw InvariantError("marking group clean over live regressor at index " +
                         std::to_string(*live));
  clean_upto_[g] = std::max(clean_upto_[g], through + 1);
}

std::optional<CommitIndex> GroupLedger::EarliestLive(GroupIndex g,
                                                     CommitRange range) const {
  const std::vector<CommitIndex>& regs = regressors_[g];
  for (auto it = std::lower_bound(regs.begin(), regs.end(), range.begin);
       it != regs.end() && *it < range.end; ++it) {
    if (!identified_[*it]) return *it;
  }
  return std::nullopt;
}

CommitRange SuspectRangeFor(const GroupLedger& ledger, GroupIndex g,
                            CommitIndex tip) {
  return {std::min(ledger.clean_upto(g), tip), tip + 1};
}

std::vector<Resolution> ResolveFailure(
    const GroupLedger& ledger, CommitRange suspects,
    std::span<const GroupIndex> failing_groups, Time detected_at,
    const BackfillScheduler& schedule) {
  if (suspects.empty())
    throw InvariantError("detected failure with an empty suspect range");
  std::vector<Resolution> out;
  out.reserve(failing_groups.size());
  for (GroupIndex g : failing_groups) {
    auto culprit = ledger.EarliestLive(g, suspects);
    if (!culprit)
      throw InvariantError("failing group without a live regressor in range");
    Resolution r;
    r.group = g;
    r.suspects = suspects;
    r.culprit = *culprit;
    r.identified_at = detected_at;
    out.push_back(std::move(r));
  }
  if (suspects.size() == 1) return out;

  for (CommitIndex c = suspects.begin; c < suspects.end; ++c) {
    for (Resolution& r : out) {
      const bool fails = c >= r.culprit;
      BackfillJob job{c, r.group, fails, schedule(c, r.group, fails)};
      if (c <= r.culprit) r.identified_at = std::max(r.identified_at, job.end_time);
      r.backfills.push_back(job);
    }
  }
  return out;
}

Resolver::Resolver(const CommitStream& stream)
    : stream_(stream),
      ledger_(stream),
      open_episode_(stream.group_count()) {}

bool Resolver::RunFails(GroupIndex g, CommitIndex tip) const {
  return ledger_.HasLive(g, {0, tip + 1});
}

Resolver::PendingIdentification Resolver::Open(const Resolution& resolution) {
  Episode e;
  e.group = resolution.group;
  e.suspects = resolution.suspects;
  e.culprit = resolution.culprit;
  e.tip = resolution.suspects.end - 1;
  episodes_.push_back(e);
  open_episode_[e.group] = episodes_.size() - 1;
  return {episodes_.size() - 1, resolution.identified_at};
}

std::vector<Resolver::PendingIdentification> Resolver::ObserveBatch(
    std::span<const GroupIndex> groups, CommitIndex tip, Time completed_at,
    const BackfillScheduler& schedule, std::vector<bool>& fails) {
  fails.assign(groups.size(), false);
  // New failures grouped by suspect range, in first-seen order.
  std::vector<std::pair<CommitRange, std::vector<GroupIndex>>> fresh;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    const GroupIndex g = groups[k];
    fails[k] = RunFails(g, tip);
    const std::optional<std::size_t> open = open_episode_[g];
    if (fails[k]) {
      if (open) {
        episodes_[*open].tip = std::max(episodes_[*open].tip, tip);
        continue;
      }
      const CommitRange range = SuspectRangeFor(ledger_, g, tip);
      auto it = std::find_if(fresh.begin(), fresh.end(),
                             [&](const auto& f) { return f.first == range; });
      if (it == fresh.end()) {
        fresh.push_back({range, {g}});
      } else {
        it->second.push_back(g);
      }
    } else if (open) {
      Episode& e = episodes_[*open];
      e.clean_tip = std::max(e.clean_tip.value_or(0), tip);
    } else {
      ledger_.MarkClean(g, tip);
    }
  }
  std::vector<PendingIdentification> out;
  for (const auto& [range, failing] : fresh) {
    for (const Resolution& r :
         ResolveFailure(ledger_, range, failing, completed_at, schedule))
      out.push_back(Open(r));
  }
  return out;
}

std::vector<Resolver::PendingIdentification> Resolver::Identify(
    std::size_t episode, Time now, const BackfillScheduler& schedule) {
  Episode& e = episodes_.at(episode);
  if (!e.open) throw InvariantError("identification of a closed episode");
  const GroupIndex g = e.group;
  const CommitIndex culprit = e.culprit;
  if (!ledger_.IsIdentified(culprit)) {
    ledger_.MarkIdentified(culprit);
    const Commit& c = stream_[culprit];
    culprits_.push_back(CulpritRecord{c.id, stream_.group(g).id, culprit, g,
                                      c.land_time, now,
                                      SecondsToHours(now - c.land_time)});
  }
  e.open = false;
  open_episode_[g].reset();

  const CommitIndex tip = e.tip;
  const std::optional<CommitIndex> clean_tip = e.clean_tip;
  const CommitRange rest{culprit + 1, tip + 1};
  if (!rest.empty() && ledger_.HasLive(g, rest)) {
    const GroupIndex only[] = {g};
    std::vector<PendingIdentification> out;
    for (const Resolution& r : ResolveFailure(ledger_, rest, only, now, schedule))
      out.push_back(Open(r));
    return out;
  }
  ledger_.MarkClean(g, std::max(tip, clean_tip.value_or(0)));
  return {};
}

std::vector<CommitIndex> Resolver::Undetected() const {
  std::vector<CommitIndex> out;
  for (CommitIndex i = 0; i < stream_.size(); ++i)
    if (stream_[i].label == 1 && !ledger_.IsIdentified(i)) out.push_back(i);
  return out;
}

bool Resolver::HasOpenEpisodes() const {
  return std::any_of(open_episode_.begin(), open_episode_.end(),
                     [](const auto& e) { return e.has_value(); });
}

}  // namespace riskbatch
