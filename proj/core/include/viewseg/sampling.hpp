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

#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "viewseg/data.hpp"
#include "viewseg/rng.hpp"

namespace viewseg {

// One labelled segment inside a training recording.
struct SegmentOccurrence {
  std::size_t recording = 0;  // index into Dataset::recordings
  int sequence_id = 0;
  int view_id = 0;
  Segment segment;
};

// Lookup tables over the training part of a dataset: seen-view recordings of
// sequences that are not held out.
class TrainingIndex {
 public:
  explicit TrainingIndex(const Dataset& dataset);

  // Sequences with at least one seen-view recording, ascending.
  const std::vector<int>& sequences() const { return sequences_; }
  // Sequences with at least two seen-view recordings, ascending.
  const std::vector<int>& multi_view_sequences() const { return multi_view_; }
  // Recording indices of a sequence's seen views, ordered by view id.
  const std::vector<std::size_t>& recordings_of(int sequence_id) const;
  const std::vector<SegmentOccurrence>& occurrences() const { return occurrences_; }
  const std::vector<std::size_t>& recordings() const { return recordings_; }

 private:
  std::vector<int> sequences_;
  std::vector<int> multi_view_;
  std::map<int, std::vector<std::size_t>> by_sequence_;
  std::vector<std::size_t> recordings_;
  std::vector<SegmentOccurrence> occurrences_;
};

// Ordered pair (q, r) of recording indices with q.view != r.view, uniform
// over the ordered pairs of distinct seen views of the sequence. Throws
// ArgumentError when the sequence has fewer than two seen views.
std::pair<std::size_t, std::size_t> sample_view_pair(const TrainingIndex& index, int sequence_id,
                                                     Rng& rng);

// Draws a first occurrence uniformly, then a partner uniformly among the
// other occurrences with the same label (and a different view unless
// allow_same_view). Firsts without a partner are redrawn. Throws
// ArgumentError when no pair exists.
std::pair<SegmentOccurrence, SegmentOccurrence> sample_action_pair(const TrainingIndex& index,
                                                                   Rng& rng, bool allow_same_view);

// Shifts features forward by `offset` frames, repeating the first frame;
// labels are kept. Requires offset < T.
Recording shift_features(const Recording& recording, std::size_t offset);
// Offset drawn uniformly from [0, delta_max]; requires delta_max < T.
Recording apply_sync_shift(const Recording& recording, std::size_t delta_max, Rng& rng);

}  // namespace viewseg
