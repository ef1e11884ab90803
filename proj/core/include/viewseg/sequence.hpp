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
#include <span>
#include <vector>

#include "viewseg/tensor.hpp"

namespace viewseg {

using LabelSequence = std::vector<int>;

// Row-major T x H matrix of per-frame features for one recording.
struct FeatureSequence {
  std::size_t frames = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  FeatureSequence() = default;
  FeatureSequence(std::size_t frames, std::size_t dim);
  FeatureSequence(std::size_t frames, std::size_t dim, std::vector<double> values);

  std::span<double> row(std::size_t t) { return {values.data() + t * dim, dim}; }
  std::span<const double> row(std::size_t t) const { return {values.data() + t * dim, dim}; }

  ad::Tensor to_tensor() const;
  bool operator==(const FeatureSequence&) const = default;
};

// Frames [start, end) carrying one label.
struct Segment {
  std::size_t start = 0;
  std::size_t end = 0;
  int label = 0;

  std::size_t length() const { return end - start; }
  bool operator==(const Segment&) const = default;
};

// Maximal constant runs in temporal order.
std::vector<Segment> segments_from_labels(std::span<const int> labels);
LabelSequence expand_segments(std::span<const Segment> segments);

}  // namespace viewseg
