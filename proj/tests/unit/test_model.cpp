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

#include <cmath>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "viewseg/checkpoint.hpp"
#include "viewseg/errors.hpp"
#include "viewseg/model.hpp"
#include "viewseg/ops.hpp"
#include "viewseg/rng.hpp"

using namespace viewseg;
using ad::Tensor;

namespace {

EncoderConfig small_config() {
  EncoderConfig c;
  c.input_dim = 3;
  c.embed_dim = 5;
  c.num_classes = 4;
  c.num_stages = 2;
  c.layers_per_stage = 3;
  return c;
}

FeatureSequence random_features(Rng& rng, std::size_t frames, std::size_t dim) {
  FeatureSequence f(frames, dim);
  for (auto& v : f.values) v = rng.normal();
  return f;
}

}  // namespace

TEST_CASE("encode is deterministic and stage shapes match") {
  const auto state = ModelState::initialize(small_config(), 11);
  Rng rng(1);
  const auto x = random_features(rng, 17, 3);
  const auto a = encode(x, state);
  const auto b = encode(x, state);
  REQUIRE(a.logits_per_stage.size() == 2);
  for (std::size_t s = 0; s < 2; ++s) {
    CHECK(a.logits_per_stage[s].dim(0) == 17);
    CHECK(a.logits_per_stage[s].dim(1) == 4);
    CHECK(std::vector<double>(a.logits_per_stage[s].values().begin(), a.logits_per_stage[s].values().end()) ==
          std::vector<double>(b.logits_per_stage[s].values().begin(), b.logits_per_stage[s].values().end()));
  }
  CHECK(a.z.dim(0) == 17);
  CHECK(a.z.dim(1) == 5);
}

TEST_CASE("a single stage is shift-equivariant away from the borders") {
  auto config = small_config();
  config.num_stages = 1;
  const auto state = ModelState::initialize(config, 12);
  const std::size_t radius = (std::size_t{1} << config.layers_per_stage) - 1;
  const std::size_t core = 20, pad = 2 * radius, shift = 5;
  Rng rng(2);
  const auto signal = random_features(rng, core, 3);
  const std::vector<double> fill{0.3, -0.7, 1.1};
  auto build = [&](std::size_t lead) {
    const std::size_t frames = core + 2 * pad + shift;
    FeatureSequence f(frames, 3);
    for (std::size_t t = 0; t < frames; ++t) {
      for (std::size_t c = 0; c < 3; ++c) {
        const bool inside = t >= lead && t < lead + core;
        f.row(t)[c] = inside ? signal.row(t - lead)[c] : fill[c];
      }
    }
    return f;
  };
  const auto z0 = encode(build(pad), state).z;
  const auto z1 = encode(build(pad + shift), state).z;
  const std::size_t frames = z0.dim(0);
  for (std::size_t t = radius; t + shift + radius < frames; ++t) {
    for (std::size_t d = 0; d < config.embed_dim; ++d) {
      CHECK(std::abs(z0.at(t, d) - z1.at(t + shift, d)) <= 1e-12);
    }
  }
}

TEST_CASE("predictor acts frame by frame") {
  const auto state = ModelState::initialize(small_config(), 13);
  Rng rng(3);
  std::vector<double> values(6 * 5);
  for (auto& v : values) v = rng.normal();
  const Tensor p0 = predictor_forward(Tensor::constant({6, 5}, values), state);
  values[2 * 5 + 1] += 0.5;
  const Tensor p1 = predictor_forward(Tensor::constant({6, 5}, values), state);
  for (std::size_t t = 0; t < 6; ++t) {
    bool changed = false;
    for (std::size_t d = 0; d < 5; ++d) changed |= p0.at(t, d) != p1.at(t, d);
    CHECK(changed == (t == 2));
  }
}

TEST_CASE("predict_labels takes the row argmax") {
  const Tensor logits = Tensor::constant({3, 2}, {0.2, 0.9, 1.5, -1, 0.4, 0.4});
  CHECK(predict_labels(logits) == LabelSequence{1, 0, 0});
}

TEST_CASE("initialization respects fan-in bounds") {
  const auto state = ModelState::initialize(small_config(), 14);
  CHECK(state.all_finite());
  for (const auto& [name, tensor] : state.named_parameters()) {
    if (tensor.rank() == 1) {
      for (const double v : tensor.values()) CHECK(v == 0.0);
      continue;
    }
    std::size_t fan_in = tensor.dim(0);
    if (tensor.rank() == 3) fan_in = tensor.dim(0) * tensor.dim(1);
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (const double v : tensor.values()) CHECK(std::abs(v) <= bound);
  }
}

TEST_CASE("config validation") {
  auto c = small_config();
  c.num_stages = 0;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c = small_config();
  c.kernel_size = 2;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
}

TEST_CASE("checkpoint round trip is exact") {
  const auto state = ModelState::initialize(small_config(), 15, 4);
  const std::string bytes = serialize_checkpoint(state);
  CHECK(bytes.substr(0, 8) == "VSEGCKPT");
  CHECK(static_cast<unsigned char>(bytes[8]) == 1);
  const auto back = deserialize_checkpoint(bytes);
  CHECK(back.config == state.config);
  CHECK(back.view_head.has_value());
  CHECK(serialize_checkpoint(back) == bytes);

  const auto path = std::filesystem::temp_directory_path() / "viewseg_unit_ckpt.ckpt";
  save_checkpoint(path, state);
  CHECK(serialize_checkpoint(load_checkpoint(path)) == bytes);
  std::filesystem::remove(path);
}

TEST_CASE("checkpoint decoding errors report offsets") {
  const std::string bytes = serialize_checkpoint(ModelState::initialize(small_config(), 16));
  std::string bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(deserialize_checkpoint(bad), FormatError);
  try {
    deserialize_checkpoint(bytes.substr(0, 30));
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() <= 30);
  }
  std::string version = bytes;
  version[8] = 9;
  CHECK_THROWS_AS(deserialize_checkpoint(version), FormatError);
}
