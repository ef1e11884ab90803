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
#include <optional>
#include <string>
#include <vector>

#include "viewseg/sequence.hpp"
#include "viewseg/tensor.hpp"

namespace viewseg {

// Multi-stage dilated TCN. Layer l of every stage uses dilation 2^l.
struct EncoderConfig {
  std::size_t input_dim = 16;
  std::size_t embed_dim = 16;
  std::size_t num_classes = 6;
  std::size_t num_stages = 2;
  std::size_t layers_per_stage = 6;
  std::size_t kernel_size = 3;

  void validate() const;
  std::size_t dilation(std::size_t layer) const { return std::size_t{1} << layer; }
  bool operator==(const EncoderConfig&) const = default;
};

// y = x W + b per row; W is [in x out].
struct Affine {
  ad::Tensor weight;
  ad::Tensor bias;

  ad::Tensor operator()(const ad::Tensor& x) const;
  std::size_t in_dim() const { return weight.dim(0); }
  std::size_t out_dim() const { return weight.dim(1); }
};

// x + pointwise(relu(dilated_conv(x)))
struct ResidualLayer {
  ad::Tensor kernel;
  ad::Tensor kernel_bias;
  Affine pointwise;
  std::size_t dilation = 1;
};

struct Stage {
  Affine input;
  std::vector<ResidualLayer> layers;
  Affine classifier;
};

// Three D -> D affine maps with GELU after the first two.
struct PredictorHead {
  Affine first;
  Affine second;
  Affine third;
};

struct NamedTensor {
  std::string name;
  ad::Tensor tensor;
};

// All trainable parameters. Tensors are shared handles, so copies of a
// ModelState alias the same storage; clone() makes an independent copy.
struct ModelState {
  EncoderConfig config;
  std::vector<Stage> stages;
  PredictorHead predictor;
  // Linear view classifier, present only for adversarial training.
  std::optional<Affine> view_head;

  // Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
  static ModelState initialize(const EncoderConfig& config, std::uint64_t seed,
                               std::size_t view_classes = 0);
  // Rebuilds a state from named tensors (the checkpoint layout), inferring
  // the configuration from names and shapes.
  static ModelState from_named(const std::vector<NamedTensor>& named);

  // Stable order: stages, predictor, view head.
  std::vector<NamedTensor> named_parameters() const;
  std::vector<ad::Tensor> parameters() const;
  ModelState clone() const;
  bool all_finite() const;
};

struct EncodeOutput {
  // Final-stage feature map before its classifier, [T x D].
  ad::Tensor z;
  std::vector<ad::Tensor> logits_per_stage;

  const ad::Tensor& final_logits() const { return logits_per_stage.back(); }
};

EncodeOutput encode(const ad::Tensor& features, const ModelState& state);
EncodeOutput encode(const FeatureSequence& features, const ModelState& state);

ad::Tensor predictor_forward(const ad::Tensor& z, const ModelState& state);

// Per-row argmax; ties go to the smallest class index.
LabelSequence predict_labels(const ad::Tensor& logits);

}  // namespace viewseg
