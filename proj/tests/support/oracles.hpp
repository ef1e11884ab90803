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

// Reference implementations used only by tests. They are written directly
// from the metric and loss definitions and share no code with the library.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "viewseg/model.hpp"
#include "viewseg/rng.hpp"

namespace oracle {

struct Run {
  int label;
  std::size_t start;
  std::size_t end;
};

std::vector<Run> runs(const std::vector<int>& labels);

// Quadratic DP over run labels, 100 * (1 - d / max(|P|, |G|)).
double edit_score(const std::vector<int>& pred, const std::vector<int>& gt);

// Size of a maximum matching between predicted and ground-truth runs, where
// an edge joins runs of equal label with IoU >= tau.
std::size_t max_matching(const std::vector<int>& pred, const std::vector<int>& gt, double tau);

// 200 tp / (|P| + |G|), 100 when both are empty.
double f1_from_matches(std::size_t tp, std::size_t pred_runs, std::size_t gt_runs);

// Labels built from random runs: lengths uniform in [1, max_run].
std::vector<int> random_labels(viewseg::Rng& rng, std::size_t frames, int classes, std::size_t max_run);

// A copy of `gt` with boundaries moved by up to `jitter` frames and each run
// relabelled with probability `flip`.
std::vector<int> perturb(const std::vector<int>& gt, viewseg::Rng& rng, int classes,
                         std::size_t jitter, double flip);

// Cosine similarity of two plain vectors with the norm floored at 1e-8.
double cosine(const std::vector<double>& a, const std::vector<double>& b);

// InfoNCE written as a double loop over anchors and candidates.
struct Entry {
  int sequence_id;
  int view_id;
  std::vector<double> vector;  // already pooled
};
double info_nce(const std::vector<Entry>& batch, double temperature);

// Sets the predictor to the identity map on inputs of modest magnitude: the
// first layer adds 50 so the GELUs act linearly, the last removes it.
void make_identity_predictor(viewseg::ModelState& state);

}  // namespace oracle
