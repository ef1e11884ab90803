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

#include <map>

#include "doctest.h"
#include "oracles.hpp"
#include "viewseg/errors.hpp"
#include "viewseg/evaluate.hpp"
#include "viewseg/metrics.hpp"

using namespace viewseg;

namespace {

std::vector<int> from_runs(std::initializer_list<std::pair<int, std::size_t>> runs) {
  std::vector<int> out;
  for (const auto& [label, length] : runs) out.insert(out.end(), length, label);
  return out;
}

}  // namespace

TEST_CASE("edit score example") {
  const auto gt = from_runs({{0, 2}, {1, 2}, {0, 2}});
  const auto pred = from_runs({{0, 3}, {1, 3}});
  CHECK(segmental_edit_score(pred, gt) == doctest::Approx(200.0 / 3.0));
  CHECK(levenshtein(std::vector<int>{0, 1, 0}, std::vector<int>{0, 1}) == 1);
  CHECK(segmental_edit_score(std::vector<int>{}, std::vector<int>{}) == 100.0);
}

TEST_CASE("F1 example") {
  const auto gt = from_runs({{0, 10}, {1, 10}});
  const auto pred = from_runs({{0, 4}, {1, 16}});
  CHECK(segment_iou({0, 4, 0}, {0, 10, 0}) == doctest::Approx(0.4));
  CHECK(segment_iou({4, 20, 1}, {10, 20, 1}) == doctest::Approx(0.625));
  const auto counts = segmental_f1_counts(pred, gt, 0.5);
  CHECK(counts.true_positives == 1);
  CHECK(counts.false_positives == 1);
  CHECK(counts.false_negatives == 1);
  CHECK(segmental_f1(pred, gt, 0.5) == doctest::Approx(50.0));
  CHECK(segmental_f1(pred, gt, 0.25) == doctest::Approx(100.0));
}

TEST_CASE("greedy matching takes the best-IoU ground truth, earliest on ties") {
  // One long prediction against two equal ground-truth runs of its label.
  const std::vector<int> gt = from_runs({{0, 4}, {1, 2}, {0, 4}});
  const std::vector<int> pred = from_runs({{0, 10}});
  const auto c = segmental_f1_counts(pred, gt, 0.1);
  CHECK(c.true_positives == 1);
  CHECK(c.false_negatives == 2);
}

TEST_CASE("frame accuracy and ignored labels") {
  const std::vector<int> gt{0, 0, 1, 1, 2, 2};
  const std::vector<int> pred{0, 1, 1, 1, 0, 0};
  CHECK(frame_accuracy(pred, gt) == doctest::Approx(50.0));
  MetricOptions o;
  o.ignore_labels = {2};
  CHECK(frame_accuracy(pred, gt, o) == doctest::Approx(75.0));
  CHECK_THROWS_AS(frame_accuracy(pred, std::vector<int>{0}), ArgumentError);
}

TEST_CASE("metrics agree with the reference matcher and DP") {
  Rng rng(30);
  for (int trial = 0; trial < 100; ++trial) {
    const auto gt = oracle::random_labels(rng, 1 + rng.uniform_index(40), 5, 8);
    const auto pred = trial % 2 ? oracle::perturb(gt, rng, 5, 3, 0.2)
                                : oracle::random_labels(rng, gt.size(), 5, 8);
    CHECK(segmental_edit_score(pred, gt) == oracle::edit_score(pred, gt));
    for (const double tau : {0.1, 0.25, 0.5}) {
      const auto c = segmental_f1_counts(pred, gt, tau);
      CHECK(c.true_positives <= oracle::max_matching(pred, gt, tau));
      CHECK(c.true_positives + c.false_positives == oracle::runs(pred).size());
      CHECK(c.true_positives + c.false_negatives == oracle::runs(gt).size());
    }
  }
}

TEST_CASE("F1 is non-increasing in tau and metrics are bounded") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto gt = oracle::random_labels(rng, 1 + rng.uniform_index(40), 4, 8);
    const auto pred = oracle::perturb(gt, rng, 4, 4, 0.3);
    double previous = 100.0;
    for (double tau = 0.05; tau <= 1.0; tau += 0.05) {
      const double f1 = segmental_f1(pred, gt, tau);
      CHECK(f1 <= previous);
      CHECK((f1 >= 0.0 && f1 <= 100.0));
      previous = f1;
    }
    const double edit = segmental_edit_score(pred, gt);
    CHECK((edit >= 0.0 && edit <= 100.0));
  }
}

TEST_CASE("relabelling classes leaves every metric unchanged") {
  Rng rng(32);
  const std::vector<int> perm{3, 0, 4, 1, 2};
  for (int trial = 0; trial < 50; ++trial) {
    const auto gt = oracle::random_labels(rng, 30, 5, 6);
    const auto pred = oracle::perturb(gt, rng, 5, 2, 0.3);
    auto pg = gt, pp = pred;
    for (auto& l : pg) l = perm[static_cast<std::size_t>(l)];
    for (auto& l : pp) l = perm[static_cast<std::size_t>(l)];
    const auto a = score_recording(pred, gt), b = score_recording(pp, pg);
    CHECK(a.acc == b.acc);
    CHECK(a.edit == b.edit);
    CHECK(a.f1_10 == b.f1_10);
    CHECK(a.f1_25 == b.f1_25);
    CHECK(a.f1_50 == b.f1_50);
  }
}

TEST_CASE("constant-class predictions on a balanced two-class set") {
  Dataset d;
  d.num_classes = 2;
  d.feature_dim = 1;
  d.class_names = {"a", "b"};
  d.split.seen_views = {0};
  for (int seq = 0; seq < 3; ++seq) {
    d.scripts[seq] = {{0, 10, 0}, {10, 20, 1}};
    Recording r;
    r.sequence_id = seq;
    r.view_id = 0;
    r.labels = expand_segments(d.scripts[seq]);
    r.features = FeatureSequence(20, 1);
    d.recordings.push_back(r);
  }
  const auto report = evaluate_all([](const Recording& r) { return LabelSequence(r.frames(), 0); }, d);
  const auto* seen = report.find("seen");
  REQUIRE(seen != nullptr);
  CHECK(seen->acc == doctest::Approx(50.0));
  CHECK(seen->f1_50 == doctest::Approx(200.0 / 3.0));
  CHECK(seen->edit == doctest::Approx(50.0));
  CHECK(seen->count == 3);
}

TEST_CASE("evaluation does not depend on the thread count") {
  Dataset d;
  d.num_classes = 3;
  d.feature_dim = 1;
  d.class_names = {"a", "b", "c"};
  d.split.seen_views = {0};
  d.split.unseen_view_groups["far"] = {1};
  Rng rng(33);
  for (int seq = 0; seq < 8; ++seq) {
    const auto labels = oracle::random_labels(rng, 30, 3, 7);
    d.scripts[seq] = segments_from_labels(labels);
    for (int view = 0; view < 2; ++view) {
      Recording r;
      r.sequence_id = seq;
      r.view_id = view;
      r.labels = labels;
      r.features = FeatureSequence(labels.size(), 1);
      for (std::size_t t = 0; t < labels.size(); ++t) r.features.values[t] = rng.uniform();
      d.recordings.push_back(r);
    }
  }
  const Labeler noisy = [](const Recording& r) {
    LabelSequence out = r.labels;
    for (std::size_t t = 0; t < out.size(); ++t) {
      if (r.features.values[t] < 0.2) out[t] = (out[t] + 1) % 3;
    }
    return out;
  };
  const std::string one = report_to_csv(evaluate_all(noisy, d, {}, 1));
  CHECK(one == report_to_csv(evaluate_all(noisy, d, {}, 4)));
  CHECK(one.rfind("group,f1_10,f1_25,f1_50,edit,acc,count\n", 0) == 0);
}
