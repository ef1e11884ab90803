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

#include "viewseg/data.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "viewseg/errors.hpp"

namespace viewseg {

void Recording::validate(std::size_t num_classes) const {
  if (features.frames != labels.size()) {
    throw ArgumentError("recording " + std::to_string(sequence_id) + "/" + std::to_string(view_id) +
                        ": " + std::to_string(features.frames) + " feature frames vs " +
                        std::to_string(labels.size()) + " labels");
  }
  for (const int l : labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= num_classes) {
      throw ArgumentError("recording " + std::to_string(sequence_id) + "/" +
                          std::to_string(view_id) + ": label " + std::to_string(l) +
                          " outside [0, " + std::to_string(num_classes) + ")");
    }
  }
}

void SplitSpec::validate() const {
  std::set<int> seen(seen_views.begin(), seen_views.end());
  if (seen.size() != seen_views.size()) throw ArgumentError("split: duplicate seen view");
  std::set<int> claimed = seen;
  for (const auto& [name, views] : unseen_view_groups) {
    if (name == "seen" || name.empty()) throw ArgumentError("split: invalid group name '" + name + "'");
    for (const int v : views) {
      if (!claimed.insert(v).second) {
        throw ArgumentError("split: view " + std::to_string(v) + " appears in group '" + name +
                            "' and another set");
      }
    }
  }
}

bool SplitSpec::is_seen(int view) const {
  return std::find(seen_views.begin(), seen_views.end(), view) != seen_views.end();
}

bool SplitSpec::is_test_sequence(int sequence) const {
  return std::find(test_sequences.begin(), test_sequences.end(), sequence) != test_sequences.end();
}

std::optional<std::string> SplitSpec::group_of(int view) const {
  if (is_seen(view)) return "seen";
  for (const auto& [name, views] : unseen_view_groups) {
    if (std::find(views.begin(), views.end(), view) != views.end()) return name;
  }
  return std::nullopt;
}

std::vector<std::string> SplitSpec::group_names() const {
  std::vector<std::string> out{"seen"};
  for (const auto& [name, views] : unseen_view_groups) out.push_back(name);
  return out;
}

void Dataset::validate() const {
  split.validate();
  if (num_classes == 0) throw ArgumentError("dataset: num_classes must be positive");
  if (!class_names.empty() && class_names.size() != num_classes) {
    throw ArgumentError("dataset: " + std::to_string(class_names.size()) + " class names for " +
                        std::to_string(num_classes) + " classes");
  }
  std::set<std::pair<int, int>> keys;
  for (const auto& rec : recordings) {
    rec.validate(num_classes);
    if (rec.features.dim != feature_dim) {
      throw ArgumentError("dataset: recording feature dim " + std::to_string(rec.features.dim) +
                          " != " + std::to_string(feature_dim));
    }
    if (!keys.insert({rec.sequence_id, rec.view_id}).second) {
      throw ArgumentError("dataset: duplicate recording for sequence " +
                          std::to_string(rec.sequence_id) + " view " + std::to_string(rec.view_id));
    }
  }
}

void GeneratorConfig::validate() const {
  if (num_classes < 2) throw ArgumentError("generator: num_classes must be >= 2");
  if (num_classes > 0xFFFF) throw ArgumentError("generator: num_classes must fit u16");
  if (seen_views < 2) throw ArgumentError("generator: need at least 2 seen views");
  if (feature_dim == 0) throw ArgumentError("generator: feature_dim must be positive");
  if (duration_min < 1 || duration_max < duration_min) {
    throw ArgumentError("generator: need 1 <= duration_min <= duration_max");
  }
  if (mean_segments < 1) throw ArgumentError("generator: mean_segments must be >= 1");
  if (num_sequences == 0) throw ArgumentError("generator: num_sequences must be positive");
  if (nuisance_rank > feature_dim) throw ArgumentError("generator: nuisance_rank exceeds feature_dim");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw ArgumentError("generator: noise_sigma must be finite and >= 0");
  }
  auto check_rho = [](double rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw ArgumentError("generator: view_distortion must lie in [0, 1]");
  };
  check_rho(view_distortion);
  if (!std::isfinite(view_offset_scale) || view_offset_scale < 0.0) {
    throw ArgumentError("generator: view_offset_scale must be finite and >= 0");
  }
  if (!std::isfinite(unseen_nuisance_gain) || unseen_nuisance_gain < 0.0) {
    throw ArgumentError("generator: unseen_nuisance_gain must be finite and >= 0");
  }
  if (!std::isfinite(offset_jitter) || offset_jitter < 0.0) {
    throw ArgumentError("generator: offset_jitter must be finite and >= 0");
  }
  std::set<std::string> names;
  for (const auto& g : unseen_groups) {
    if (g.name.empty() || g.name == "seen" || !names.insert(g.name).second) {
      throw ArgumentError("generator: invalid or duplicate unseen group name '" + g.name + "'");
    }
    if (g.view_distortion) check_rho(*g.view_distortion);
  }
}

}  // namespace viewseg
