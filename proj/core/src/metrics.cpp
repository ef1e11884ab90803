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

#include "viewseg/metrics.hpp"

#include <algorithm>
#include <string>

#include "viewseg/errors.hpp"

namespace viewseg {
namespace {

void require_equal_length(std::span<const int> pred, std::span<const int> gt, const char* what) {
  if (pred.size() != gt.size()) {
    throw ArgumentError(std::string(what) + ": prediction has " + std::to_string(pred.size()) +
                        " frames, ground truth " + std::to_string(gt.size()));
  }
}

std::vector<Segment> scored_segments(std::span<const int> labels, const MetricOptions& options) {
  auto segments = segments_from_labels(labels);
  std::erase_if(segments, [&](const Segment& s) { return options.ignore_labels.count(s.label) > 0; });
  return segments;
}

}  // namespace

double frame_accuracy(std::span<const int> pred, std::span<const int> gt,
                      const MetricOptions& options) {
  require_equal_length(pred, gt, "frame_accuracy");
  std::size_t counted = 0;
  std::size_t correct = 0;
  for (std::size_t t = 0; t < gt.size(); ++t) {
    if (options.ignore_labels.count(gt[t])) continue;
    ++counted;
    if (pred[t] == gt[t]) ++correct;
  }
  if (counted == 0) return 100.0;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(counted);
}

std::size_t levenshtein(std::span<const int> a, std::span<const int> b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t substitute = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, substitute});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double segmental_edit_score(std::span<const int> pred, std::span<const int> gt,
                            const MetricOptions& options) {
  std::vector<int> p;
  std::vector<int> g;
  for (const auto& s : scored_segments(pred, options)) p.push_back(s.label);
  for (const auto& s : scored_segments(gt, options)) g.push_back(s.label);
  const std::size_t longest = std::max(p.size(), g.size());
  if (longest == 0) return 100.0;
  return 100.0 * (1.0 - static_cast<double>(levenshtein(p, g)) / static_cast<double>(longest));
}

double F1Counts::f1() const {
  const std::size_t denom = 2 * true_positives + false_positives + false_negatives;
  if (denom == 0) return 100.0;
  return 200.0 * static_cast<double>(true_positives) / static_cast<double>(denom);
}

double segment_iou(const Segment& a, const Segment& b) {
  const std::size_t lo = std::max(a.start, b.start);
  const std::size_t hi = std::min(a.end, b.end);
  const std::size_t inter = hi > lo ? hi - lo : 0;
  const std::size_t uni = std::max(a.end, b.end) - std::min(a.start, b.start);
  return static_cast<double>(inter) / static_cast<double>(uni);
}

F1Counts segmental_f1_counts(std::span<const int> pred, std::span<const int> gt, double tau,
                             const MetricOptions& options) {
  require_equal_length(pred, gt, "segmental_f1");
  if (!(tau > 0.0 && tau <= 1.0)) throw ArgumentError("segmental_f1: tau must lie in (0, 1]");
  const auto p = scored_segments(pred, options);
  const auto g = scored_segments(gt, options);
  std::vector<bool> matched(g.size(), false);
  F1Counts counts;
  for (const auto& seg : p) {
    double best = -1.0;
    std::size_t best_index = g.size();
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (g[j].label != seg.label) continue;
      const double iou = segment_iou(seg, g[j]);
      if (iou > best) {
        best = iou;
        best_index = j;
      }
    }
    if (best_index < g.size() && best >= tau && !matched[best_index]) {
      matched[best_index] = true;
      ++counts.true_positives;
    } else {
      ++counts.false_positives;
    }
  }
  counts.false_negatives =
      static_cast<std::size_t>(std::count(matched.begin(), matched.end(), false));
  return counts;
}

double segmental_f1(std::span<const int> pred, std::span<const int> gt, double tau,
                    const MetricOptions& options) {
  return segmental_f1_counts(pred, gt, tau, options).f1();
}

}  // namespace viewseg
