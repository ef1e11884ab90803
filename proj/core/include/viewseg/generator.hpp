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

#include <vector>

#include "viewseg/data.hpp"

namespace viewseg {

// Affine map of one camera view applied to latent frame vectors.
struct ViewTransform {
  int view_id = 0;
  bool seen = false;
  std::vector<double> matrix;                // H x H row-major
  std::vector<std::vector<double>> offsets;  // per class, H
};

// Latent quantities behind a generated dataset.
struct SyntheticWorld {
  std::size_t feature_dim = 0;
  std::vector<std::vector<double>> prototypes;  // one H-vector per class
  std::vector<ViewTransform> views;             // seen views first, then unseen groups
  std::vector<std::vector<double>> nuisance;    // orthonormal basis of the offset subspace
  SplitSpec split;

  const ViewTransform& view(int view_id) const;
};

// Deterministic in cfg.seed. Independent substreams are derived for the
// prototypes, view transforms, segment scripts and frame noise.
SyntheticWorld build_world(const GeneratorConfig& cfg);

// Sequences [0, num_sequences) are recorded from the seen views only;
// sequences [num_sequences, num_sequences + num_test_sequences) are held out
// and recorded from every view. All views of a sequence share one script.
Dataset generate_synthetic(const GeneratorConfig& cfg);

}  // namespace viewseg
