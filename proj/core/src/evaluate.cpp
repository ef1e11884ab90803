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

#include "viewseg/evaluate.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "viewseg/errors.hpp"

namespace viewseg {

const GroupMetrics* EvalReport::find(const std::string& name) const {
  for (const auto& g : groups) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

std::optional<double> EvalReport::unseen_mean(double GroupMetrics::*metric) const {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& g : groups) {
    if (g.name == "seen") continue;
    total += g.*metric;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return total / static_cast<double>(n);
}

RecordingScore score_recording(std::span<const int> pred, std::span<const int> gt,
                               const MetricOptions& options) {
  RecordingScore s;
  s.f1_10 = segmental_f1(pred, gt, 0.10, options);
  s.f1_25 = segmental_f1(pred, gt, 0.25, options);
  s.f1_50 = segmental_f1(pred, gt, 0.50, options);
  s.edit = segmental_edit_score(pred, gt, options);
  s.acc = frame_accuracy(pred, gt, options);
  return s;
}

EvalReport reduce_scores(const SplitSpec& split, const std::vector<int>& view_ids,
                         const std::vector<RecordingScore>& scores) {
  EvalReport report;
  for (const auto& name : split.group_names()) {
    GroupMetrics g;
    g.name = name;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (split.group_of(view_ids[i]) != name) continue;
      g.f1_10 += scores[i].f1_10;
      g.f1_25 += scores[i].f1_25;
      g.f1_50 += scores[i].f1_50;
      g.edit += scores[i].edit;
      g.acc += scores[i].acc;
      ++g.count;
    }
    if (g.count == 0) {
      report.warnings.push_back("group '" + name + "' has no recordings; omitted");
      continue;
    }
    const double n = static_cast<double>(g.count);
    g.f1_10 /= n;
    g.f1_25 /= n;
    g.f1_50 /= n;
    g.edit /= n;
    g.acc /= n;
    report.groups.push_back(g);
  }
  return report;
}

EvalReport evaluate_all(const Labeler& labeler, const Dataset& dataset,
                        const MetricOptions& options, std::size_t threads) {
  std::vector<const Recording*> selected;
  const bool held_out_only = !dataset.split.test_sequences.empty();
  for (const auto& rec : dataset.recordings) {
    if (held_out_only && !dataset.split.is_test_sequence(rec.sequence_id)) continue;
    if (!dataset.split.group_of(rec.view_id)) continue;
    selected.push_back(&rec);
  }
  std::vector<RecordingScore> scores(selected.size());
  std::vector<int> views(selected.size());
  auto work = [&](std::size_t i) {
    const LabelSequence pred = labeler(*selected[i]);
    scores[i] = score_recording(pred, selected[i]->labels, options);
    views[i] = selected[i]->view_id;
  };
  if (threads <= 1 || selected.size() < 2) {
    for (std::size_t i = 0; i < selected.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(threads, selected.size()); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < selected.size(); i = next++) {
          try {
            work(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  return reduce_scores(dataset.split, views, scores);
}

EvalReport evaluate_all(const ModelState& state, const Dataset& dataset,
                        const MetricOptions& options, std::size_t threads) {
  return evaluate_all(
      [&state](const Recording& rec) { return predict_labels(encode(rec.features, state).final_logits()); },
      dataset, options, threads);
}

std::string report_to_csv(const EvalReport& report) {
  std::string out = "group,f1_10,f1_25,f1_50,edit,acc,count\n";
  char line[256];
  for (const auto& g : report.groups) {
    std::snprintf(line, sizeof line, "%s,%.4f,%.4f,%.4f,%.4f,%.4f,%zu\n", g.name.c_str(), g.f1_10,
                  g.f1_25, g.f1_50, g.edit, g.acc, g.count);
    out += line;
  }
  return out;
}

}  // namespace viewseg
