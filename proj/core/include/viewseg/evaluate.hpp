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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "viewseg/data.hpp"
#include "viewseg/metrics.hpp"
#include "viewseg/model.hpp"

namespace viewseg {

struct GroupMetrics {
  std::string name;
  double f1_10 = 0.0;
  double f1_25 = 0.0;
  double f1_50 = 0.0;
  double edit = 0.0;
  double acc = 0.0;
  std::size_t count = 0;
};

// Per-recording scores macro-averaged within each view group.
struct EvalReport {
  std::vector<GroupMetrics> groups;
  // Groups that had no recordings, and other non-fatal notes.
  std::vector<std::string> warnings;

  const GroupMetrics* find(const std::string& name) const;
  // Mean of a metric over every group except "seen"; nullopt if there are none.
  std::optional<double> unseen_mean(double GroupMetrics::*metric) const;
};

struct RecordingScore {
  double f1_10 = 0.0;
  double f1_25 = 0.0;
  double f1_50 = 0.0;
  double edit = 0.0;
  double acc = 0.0;
};

RecordingScore score_recording(std::span<const int> pred, std::span<const int> gt,
                               const MetricOptions& options = {});

using Labeler = std::function<LabelSequence(const Recording&)>;

// Scores every evaluation recording: those of held-out sequences when the
// split names any, otherwise all recordings. Recordings whose view is in no
// group are skipped. `threads` > 1 labels recordings concurrently; the
// reduction order is fixed, so results do not depend on it.
EvalReport evaluate_all(const Labeler& labeler, const Dataset& dataset,
                        const MetricOptions& options = {}, std::size_t threads = 1);

// Labels with the final-stage logits of the model.
EvalReport evaluate_all(const ModelState& state, const Dataset& dataset,
                        const MetricOptions& options = {}, std::size_t threads = 1);

// Reduces already-scored recordings into groups named by `split`.
EvalReport reduce_scores(const SplitSpec& split, const std::vector<int>& view_ids,
                         const std::vector<RecordingScore>& scores);

// CSV with header group,f1_10,f1_25,f1_50,edit,acc,count.
std::string report_to_csv(const EvalReport& report);

}  // namespace viewseg
