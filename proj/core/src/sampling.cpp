// Copyright 2026 The viewseg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "viewseg/sampling.hpp"

#include <algorithm>
#include <string>

#include "viewseg/errors.hpp"

namespace viewseg {

TrainingIndex::TrainingIndex(const Dataset& dataset) {
  for (std::size_t i = 0; i < dataset.recordings.size(); ++i) {
    const Recording& rec = dataset.recordings[i];
    if (!dataset.split.is_seen(rec.view_id) || dataset.split.is_test_sequence(rec.sequence_id)) {
      continue;
    }
    by_sequence_[rec.sequence_id].push_back(i);
    recordings_.push_back(i);
  }
  for (auto& [seq, recs] : by_sequence_) {
    std::sort(recs.begin(), recs.end(), [&](std::size_t a, std::size_t b) {
      return dataset.recordings[a].view_id < dataset.recordings[b].view_id;
    });
    sequences_.push_back(seq);
    if (recs.size() >= 2) multi_view_.push_back(seq);
    for (const std::size_t r : recs) {
      const Recording& rec = dataset.recordings[r];
      for (const auto& seg : segments_from_labels(rec.labels)) {
        occurrences_.push_back({r, rec.sequence_id, rec.view_id, seg});
      }
    }
  }
}

const std::vector<std::size_t>& TrainingIndex::recordings_of(int sequence_id) const {
  static const std::vector<std::size_t> kEmpty;
  const auto it = by_sequence_.find(sequence_id);
  return it == by_sequence_.end() ? kEmpty : it->second;
}

std::pair<std::size_t, std::size_t> sample_view_pair(const TrainingIndex& index, int sequence_id,
                                                     Rng& rng) {
  const auto& recs = index.recordings_of(sequence_id);
  if (recs.size() < 2) {
    throw ArgumentError("sequence " + std::to_string(sequence_id) + " has " +
                        std::to_string(recs.size()) + " seen views; need 2");
  }
  const std::size_t q = rng.uniform_index(recs.size());
  std::size_t r = rng.uniform_index(recs.size() - 1);
  if (r >= q) ++r;
  return {recs[q], recs[r]};
}

namespace {

bool is_partner(const SegmentOccurrence& a, const SegmentOccurrence& b, bool allow_same_view) {
  if (a.segment.label != b.segment.label) return false;
  if (a.recording == b.recording && a.segment == b.segment) return false;
  return allow_same_view || a.view_id != b.view_id;
}

}  // namespace

std::pair<SegmentOccurrence, SegmentOccurrence> sample_action_pair(const TrainingIndex& index,
                                                                   Rng& rng, bool allow_same_view) {
  const auto& occ = index.occurrences();
  // Partners grouped by label so each draw is O(occurrences of that label).
  std::map<int, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < occ.size(); ++i) by_label[occ[i].segment.label].push_back(i);

  auto partners_of = [&](std::size_t first) {
    std::vector<std::size_t> out;
    for (const std::size_t j : by_label[occ[first].segment.label]) {
      if (is_partner(occ[first], occ[j], allow_same_view)) out.push_back(j);
    }
    return out;
  };

  bool any_pair = false;
  for (std::size_t i = 0; i < occ.size() && !any_pair; ++i) any_pair = !partners_of(i).empty();
  if (!any_pair) throw ArgumentError("no valid action pair in the training data");

  for (;;) {
    const std::size_t first = rng.uniform_index(occ.size());
    const auto partners = partners_of(first);
    if (partners.empty()) continue;
    return {occ[first], occ[partners[rng.uniform_index(partners.size())]]};
  }
}

Recording shift_features(const Recording& recording, std::size_t offset) {
  const std::size_t frames = recording.features.frames;
  if (offset >= frames && frames > 0) {
    throw ArgumentError("sync shift " + std::to_string(offset) + " must be below T=" +
                        std::to_string(frames));
  }
  Recording out = recording;
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t src = t >= offset ? t - offset : 0;
    const auto from = recording.features.row(src);
    std::copy(from.begin(), from.end(), out.features.row(t).begin());
  }
  return out;
}

Recording apply_sync_shift(const Recording& recording, std::size_t delta_max, Rng& rng) {
  if (delta_max >= recording.features.frames) {
    throw ArgumentError("sync shift bound " + std::to_string(delta_max) + " must be below T=" +
                        std::to_string(recording.features.frames));
  }
  const auto offset = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(delta_max)));
  return shift_features(recording, offset);
}

}  // namespace viewseg
