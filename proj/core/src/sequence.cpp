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

#include "viewseg/sequence.hpp"

#include <string>

#include "viewseg/errors.hpp"

namespace viewseg {

FeatureSequence::FeatureSequence(std::size_t frames, std::size_t dim)
    : frames(frames), dim(dim), values(frames * dim, 0.0) {}

FeatureSequence::FeatureSequence(std::size_t frames, std::size_t dim, std::vector<double> values)
    : frames(frames), dim(dim), values(std::move(values)) {
  if (this->values.size() != frames * dim) {
    throw ShapeError("feature sequence: " + std::to_string(this->values.size()) +
                     " values for " + std::to_string(frames) + "x" + std::to_string(dim));
  }
}

ad::Tensor FeatureSequence::to_tensor() const {
  return ad::Tensor::constant({frames, dim}, values);
}

std::vector<Segment> segments_from_labels(std::span<const int> labels) {
  std::vector<Segment> out;
  std::size_t start = 0;
  for (std::size_t t = 1; t <= labels.size(); ++t) {
    if (t == labels.size() || labels[t] != labels[start]) {
      out.push_back({start, t, labels[start]});
      start = t;
    }
  }
  return out;
}

LabelSequence expand_segments(std::span<const Segment> segments) {
  LabelSequence out;
  for (const auto& s : segments) out.insert(out.end(), s.length(), s.label);
  return out;
}

}  // namespace viewseg
