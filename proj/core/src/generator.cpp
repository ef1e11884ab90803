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

#include "viewseg/generator.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "viewseg/errors.hpp"
#include "viewseg/rng.hpp"

namespace viewseg {
namespace {

enum Stream : std::uint64_t { kPrototypes = 1, kViews = 2, kScripts = 3, kNoise = 4 };

// Columns of a Gaussian rows x cols matrix orthonormalized by modified
// Gram-Schmidt; returned column-major (column c at [c*rows, (c+1)*rows)).
std::vector<double> random_orthonormal_columns(std::size_t rows, std::size_t cols, Rng& rng) {
  std::vector<double> q(rows * cols);
  for (std::size_t c = 0; c < cols; ++c) {
    double* col = q.data() + c * rows;
    double norm = 0.0;
    do {
      for (std::size_t r = 0; r < rows; ++r) col[r] = rng.normal();
      for (std::size_t p = 0; p < c; ++p) {
        const double* prev = q.data() + p * rows;
        double dot = 0.0;
        for (std::size_t r = 0; r < rows; ++r) dot += col[r] * prev[r];
        for (std::size_t r = 0; r < rows; ++r) col[r] -= dot * prev[r];
      }
      norm = 0.0;
      for (std::size_t r = 0; r < rows; ++r) norm += col[r] * col[r];
      norm = std::sqrt(norm);
    } while (norm < 1e-6);
    for (std::size_t r = 0; r < rows; ++r) col[r] /= norm;
  }
  return q;
}

// Nuisance codes: `shared` holds the seen views' per-class codes (k each).
ViewTransform make_view(int view_id, bool seen, double rho, const GeneratorConfig& cfg,
                        const std::vector<double>& nuisance,
                        const std::vector<std::vector<double>>& shared, Rng& rng) {
  const std::size_t h = cfg.feature_dim;
  ViewTransform view;
  view.view_id = view_id;
  view.seen = seen;
  const std::vector<double> q = random_orthonormal_columns(h, h, rng);
  view.matrix.assign(h * h, 0.0);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < h; ++c) {
      view.matrix[r * h + c] = rho * q[c * h + r] + (r == c ? 1.0 - rho : 0.0);
    }
  }
  // How each action looks from this view: a per-class shift inside the
  // shared nuisance subspace.
  const double unseen_sd =
      cfg.unseen_nuisance_gain * std::sqrt(1.0 + cfg.offset_jitter * cfg.offset_jitter);
  view.offsets.assign(cfg.num_classes, std::vector<double>(h, 0.0));
  for (std::size_t a = 0; a < cfg.num_classes; ++a) {
    for (std::size_t k = 0; k < cfg.nuisance_rank; ++k) {
      const double code =
          seen ? shared[a][k] + cfg.offset_jitter * rng.normal() : unseen_sd * rng.normal();
      const double coefficient = rho * cfg.view_offset_scale * code;
      for (std::size_t r = 0; r < h; ++r) view.offsets[a][r] += coefficient * nuisance[k * h + r];
    }
  }
  return view;
}

std::vector<Segment> make_script(const GeneratorConfig& cfg, Rng& rng) {
  const auto mean = static_cast<std::int64_t>(cfg.mean_segments);
  const auto count = static_cast<std::size_t>(rng.uniform_int(std::max<std::int64_t>(1, mean - 2), mean + 2));
  std::vector<Segment> script;
  std::size_t frame = 0;
  int previous = -1;
  for (std::size_t s = 0; s < count; ++s) {
    int label = 0;
    if (previous < 0) {
      label = static_cast<int>(rng.uniform_index(cfg.num_classes));
    } else {
      // Uniform over the other C - 1 classes.
      label = static_cast<int>(rng.uniform_index(cfg.num_classes - 1));
      if (label >= previous) ++label;
    }
    const auto duration = static_cast<std::size_t>(rng.uniform_int(
        static_cast<std::int64_t>(cfg.duration_min), static_cast<std::int64_t>(cfg.duration_max)));
    script.push_back({frame, frame + duration, label});
    frame += duration;
    previous = label;
  }
  return script;
}

Recording render(int sequence_id, const ViewTransform& view, const std::vector<Segment>& script,
                 const SyntheticWorld& world, const GeneratorConfig& cfg, Rng& noise) {
  const std::size_t h = world.feature_dim;
  Recording rec;
  rec.sequence_id = sequence_id;
  rec.view_id = view.view_id;
  rec.labels = expand_segments(script);
  rec.features = FeatureSequence(rec.labels.size(), h);
  const double sigma = cfg.noise_sigma;
  std::vector<double> latent(h);
  for (std::size_t t = 0; t < rec.labels.size(); ++t) {
    const auto label = static_cast<std::size_t>(rec.labels[t]);
    const auto& mu = world.prototypes[label];
    const auto& offset = view.offsets[label];
    for (std::size_t d = 0; d < h; ++d) latent[d] = mu[d] + sigma * noise.normal();
    auto out = rec.features.row(t);
    for (std::size_t r = 0; r < h; ++r) {
      double acc = offset[r];
      const double* m = view.matrix.data() + r * h;
      for (std::size_t c = 0; c < h; ++c) acc += m[c] * latent[c];
      out[r] = acc;
    }
  }
  return rec;
}

}  // namespace

const ViewTransform& SyntheticWorld::view(int view_id) const {
  for (const auto& v : views) {
    if (v.view_id == view_id) return v;
  }
  throw ArgumentError("no view " + std::to_string(view_id));
}

SyntheticWorld build_world(const GeneratorConfig& cfg) {
  cfg.validate();
  SyntheticWorld world;
  world.feature_dim = cfg.feature_dim;
  Rng proto_rng(derive_seed(cfg.seed, kPrototypes));
  world.prototypes.assign(cfg.num_classes, std::vector<double>(cfg.feature_dim));
  for (auto& mu : world.prototypes) {
    for (auto& v : mu) v = proto_rng.normal();
  }

  Rng view_rng(derive_seed(cfg.seed, kViews));
  const std::vector<double> nuisance =
      random_orthonormal_columns(cfg.feature_dim, cfg.nuisance_rank, view_rng);
  for (std::size_t k = 0; k < cfg.nuisance_rank; ++k) {
    world.nuisance.emplace_back(nuisance.begin() + static_cast<std::ptrdiff_t>(k * cfg.feature_dim),
                                nuisance.begin() + static_cast<std::ptrdiff_t>((k + 1) * cfg.feature_dim));
  }
  std::vector<std::vector<double>> shared(cfg.num_classes, std::vector<double>(cfg.nuisance_rank));
  for (auto& code : shared) {
    for (auto& c : code) c = view_rng.normal();
  }
  int next_view = 0;
  for (std::size_t v = 0; v < cfg.seen_views; ++v) {
    world.split.seen_views.push_back(next_view);
    world.views.push_back(make_view(next_view++, true, cfg.view_distortion, cfg, nuisance, shared, view_rng));
  }
  for (const auto& group : cfg.unseen_groups) {
    auto& members = world.split.unseen_view_groups[group.name];
    const double rho = group.view_distortion.value_or(cfg.view_distortion);
    for (std::size_t v = 0; v < group.views; ++v) {
      members.push_back(next_view);
      world.views.push_back(make_view(next_view++, false, rho, cfg, nuisance, shared, view_rng));
    }
  }
  for (std::size_t s = 0; s < cfg.num_test_sequences; ++s) {
    world.split.test_sequences.push_back(static_cast<int>(cfg.num_sequences + s));
  }
  return world;
}

Dataset generate_synthetic(const GeneratorConfig& cfg) {
  const SyntheticWorld world = build_world(cfg);
  Dataset dataset;
  dataset.num_classes = cfg.num_classes;
  dataset.feature_dim = cfg.feature_dim;
  dataset.split = world.split;
  for (std::size_t c = 0; c < cfg.num_classes; ++c) {
    char name[32];
    std::snprintf(name, sizeof name, "action_%02zu", c);
    dataset.class_names.emplace_back(name);
  }

  Rng script_rng(derive_seed(cfg.seed, kScripts));
  Rng noise_rng(derive_seed(cfg.seed, kNoise));
  const std::size_t total = cfg.num_sequences + cfg.num_test_sequences;
  for (std::size_t s = 0; s < total; ++s) {
    const int sequence_id = static_cast<int>(s);
    const bool held_out = s >= cfg.num_sequences;
    auto script = make_script(cfg, script_rng);
    for (const auto& view : world.views) {
      if (!view.seen && !held_out) continue;
      dataset.recordings.push_back(render(sequence_id, view, script, world, cfg, noise_rng));
    }
    dataset.scripts[sequence_id] = std::move(script);
  }
  dataset.validate();
  return dataset;
}

}  // namespace viewseg
