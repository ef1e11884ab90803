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
#include <set>
#include <span>
#include <vector>

#include "viewseg/sequence.hpp"

namespace viewseg {

// Labels excluded from scoring (e.g. a background class). Ignored frames do
// not count toward accuracy; ignored segments are dropped before the
// segmental metrics.
struct MetricOptions {
  std::set<int> ignore_labels;
};

// Percent of frames where pred == gt. Throws ArgumentError on length mismatch.
double frame_accuracy(std::span<const int> pred, std::span<const int> gt,
                      const MetricOptions& options = {});

// Levenshtein distance with unit costs.
std::size_t levenshtein(std::span<const int> a, std::span<const int> b);

// 100 * (1 - d / max(|P|, |G|)) over the segment label sequences; 100 when
// both are empty.
double segmental_edit_score(std::span<const int> pred, std::span<const int> gt,
                            const MetricOptions& options = {});

struct F1Counts {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;

  // 200 TP / (2 TP + FP + FN); 100 when there are no segments at all.
  double f1() const;
};

// Greedy matching in predicted order: each predicted segment takes the
// same-label ground-truth segment with the highest IoU (earliest on ties);
// it is a hit when that IoU >= tau and the segment is still unmatched.
F1Counts segmental_f1_counts(std::span<const int> pred, std::span<const int> gt, double tau,
                             const MetricOptions& options = {});
double segmental_f1(std::span<const int> pred, std::span<const int> gt, double tau,
                    const MetricOptions& options = {});

double segment_iou(const Segment& a, const Segment& b);

}  // namespace viewseg
