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
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "viewseg/sequence.hpp"

namespace viewseg {

struct Recording {
  int sequence_id = 0;
  int view_id = 0;
  FeatureSequence features;
  LabelSequence labels;

  std::size_t frames() const { return labels.size(); }
  // Throws ArgumentError if features and labels disagree on T or a label is
  // outside [0, num_classes).
  void validate(std::size_t num_classes) const;
  bool operator==(const Recording&) const = default;
};

// Which views are available for training and how held-out views are grouped
// for reporting. Sequences listed in test_sequences are never trained on.
struct SplitSpec {
  std::vector<int> seen_views;
  std::map<std::string, std::vector<int>> unseen_view_groups;
  std::vector<int> test_sequences;

  // Seen and unseen sets must be disjoint, groups pairwise disjoint, and
  // "seen" is reserved as a group name.
  void validate() const;
  bool is_seen(int view) const;
  bool is_test_sequence(int sequence) const;
  // "seen", the unseen group containing the view, or nullopt.
  std::optional<std::string> group_of(int view) const;
  // "seen" followed by the unseen groups in name order.
  std::vector<std::string> group_names() const;
  bool operator==(const SplitSpec&) const = default;
};

struct Dataset {
  std::size_t num_classes = 0;
  std::size_t feature_dim = 0;
  std::vector<std::string> class_names;
  std::vector<Recording> recordings;
  SplitSpec split;
  // Ground-truth segment script per sequence id, shared by all its views.
  std::map<int, std::vector<Segment>> scripts;

  void validate() const;
  bool operator==(const Dataset&) const = default;
};

struct UnseenGroupConfig {
  std::string name;
  std::size_t views = 1;
  // Distortion for this group's views; the generator-wide value when unset.
  std::optional<double> view_distortion;
  bool operator==(const UnseenGroupConfig&) const = default;
};

// Latent model: per class a prototype mu ~ N(0, I_H); per view an affine map
// A_v = (1 - rho) I + rho Q_v (Q_v random orthogonal) and per class an offset
// b_{v,a} = rho * offset_scale * N c_{v,a} inside a rank-k nuisance basis N
// shared by all views; frame t of view v is A_v (mu_{a_t} + eps) + b_{v,a_t}
// with eps ~ N(0, sigma^2 I) drawn per view. Seen views share one code per
// class, c_{v,a} = c_a + jitter * g_{v,a}, so the nuisance looks like class
// evidence during training; every unseen view draws its own codes with the
// same variance. Offsets scale with rho, so rho = 0 makes all views agree.
struct GeneratorConfig {
  std::size_t num_sequences = 60;
  std::size_t num_test_sequences = 20;
  std::size_t num_classes = 6;
  std::size_t feature_dim = 16;
  std::size_t seen_views = 4;
  std::vector<UnseenGroupConfig> unseen_groups = {{"unseen_exo", 1, std::nullopt},
                                                  {"unseen_ego", 1, std::nullopt}};
  std::size_t mean_segments = 8;
  std::size_t duration_min = 6;
  std::size_t duration_max = 18;
  double noise_sigma = 1.2;
  double view_distortion = 0.1;
  double view_offset_scale = 4.0;
  double offset_jitter = 5.0;
  // Multiplies the nuisance offsets of unseen views.
  double unseen_nuisance_gain = 1.0;
  std::size_t nuisance_rank = 8;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const GeneratorConfig&) const = default;
};

}  // namespace viewseg
