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

#include "viewseg/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "viewseg/errors.hpp"
#include "viewseg/ops.hpp"
#include "viewseg/rng.hpp"

namespace viewseg {

void EncoderConfig::validate() const {
  if (input_dim == 0 || embed_dim == 0 || num_classes == 0) {
    throw ArgumentError("encoder config: dimensions must be positive");
  }
  if (num_stages == 0 || layers_per_stage == 0) {
    throw ArgumentError("encoder config: need at least one stage and one layer");
  }
  if (kernel_size % 2 == 0) throw ArgumentError("encoder config: kernel_size must be odd");
  if (layers_per_stage > 30) throw ArgumentError("encoder config: too many layers per stage");
}

ad::Tensor Affine::operator()(const ad::Tensor& x) const {
  return ad::add(ad::matmul(x, weight), bias);
}

namespace {

ad::Tensor uniform_weight(ad::Shape shape, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::vector<double> values(ad::shape_numel(shape));
  for (auto& v : values) v = rng.uniform(-bound, bound);
  return ad::Tensor::parameter(std::move(shape), std::move(values));
}

Affine make_affine(std::size_t in, std::size_t out, Rng& rng) {
  return {uniform_weight({in, out}, in, rng), ad::Tensor::zeros({out}, true)};
}

void push_affine(std::vector<NamedTensor>& out, const std::string& prefix, const Affine& a) {
  out.push_back({prefix + ".weight", a.weight});
  out.push_back({prefix + ".bias", a.bias});
}

}  // namespace

ModelState ModelState::initialize(const EncoderConfig& config, std::uint64_t seed,
                                  std::size_t view_classes) {
  config.validate();
  Rng rng(seed);
  ModelState state;
  state.config = config;
  const std::size_t d = config.embed_dim;
  const std::size_t k = config.kernel_size;
  for (std::size_t s = 0; s < config.num_stages; ++s) {
    Stage stage;
    const std::size_t in = s == 0 ? config.input_dim : config.num_classes;
    stage.input = make_affine(in, d, rng);
    for (std::size_t l = 0; l < config.layers_per_stage; ++l) {
      ResidualLayer layer;
      layer.kernel = uniform_weight({k, d, d}, k * d, rng);
      layer.kernel_bias = ad::Tensor::zeros({d}, true);
      layer.pointwise = make_affine(d, d, rng);
      layer.dilation = config.dilation(l);
      stage.layers.push_back(std::move(layer));
    }
    stage.classifier = make_affine(d, config.num_classes, rng);
    state.stages.push_back(std::move(stage));
  }
  state.predictor.first = make_affine(d, d, rng);
  state.predictor.second = make_affine(d, d, rng);
  state.predictor.third = make_affine(d, d, rng);
  if (view_classes > 0) state.view_head = make_affine(d, view_classes, rng);
  return state;
}

std::vector<NamedTensor> ModelState::named_parameters() const {
  std::vector<NamedTensor> out;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const std::string prefix = "stage" + std::to_string(s);
    const Stage& stage = stages[s];
    push_affine(out, prefix + ".input", stage.input);
    for (std::size_t l = 0; l < stage.layers.size(); ++l) {
      const std::string lp = prefix + ".layer" + std::to_string(l);
      out.push_back({lp + ".conv.kernel", stage.layers[l].kernel});
      out.push_back({lp + ".conv.bias", stage.layers[l].kernel_bias});
      push_affine(out, lp + ".pointwise", stage.layers[l].pointwise);
    }
    push_affine(out, prefix + ".classifier", stage.classifier);
  }
  push_affine(out, "predictor.fc1", predictor.first);
  push_affine(out, "predictor.fc2", predictor.second);
  push_affine(out, "predictor.fc3", predictor.third);
  if (view_head) push_affine(out, "view_head", *view_head);
  return out;
}

std::vector<ad::Tensor> ModelState::parameters() const {
  std::vector<ad::Tensor> out;
  for (auto& named : named_parameters()) out.push_back(named.tensor);
  return out;
}

ModelState ModelState::from_named(const std::vector<NamedTensor>& named) {
  std::map<std::string, ad::Tensor> by_name;
  for (const auto& n : named) {
    if (!by_name.emplace(n.name, n.tensor).second) {
      throw ArgumentError("duplicate parameter '" + n.name + "'");
    }
  }
  auto take = [&](const std::string& name, std::size_t rank) -> ad::Tensor {
    const auto it = by_name.find(name);
    if (it == by_name.end()) throw ArgumentError("missing parameter '" + name + "'");
    if (it->second.rank() != rank) {
      throw ShapeError("parameter '" + name + "' has shape " + ad::shape_string(it->second.shape()));
    }
    ad::Tensor t = ad::Tensor::parameter(it->second.shape(),
                                         {it->second.values().begin(), it->second.values().end()});
    by_name.erase(it);
    return t;
  };
  auto take_affine = [&](const std::string& prefix) {
    return Affine{take(prefix + ".weight", 2), take(prefix + ".bias", 1)};
  };

  ModelState state;
  std::size_t stage_count = 0;
  while (by_name.count("stage" + std::to_string(stage_count) + ".input.weight")) ++stage_count;
  if (stage_count == 0) throw ArgumentError("no encoder stages found");
  std::size_t layer_count = 0;
  while (by_name.count("stage0.layer" + std::to_string(layer_count) + ".conv.kernel")) ++layer_count;

  for (std::size_t s = 0; s < stage_count; ++s) {
    const std::string prefix = "stage" + std::to_string(s);
    Stage stage;
    stage.input = take_affine(prefix + ".input");
    for (std::size_t l = 0; l < layer_count; ++l) {
      const std::string lp = prefix + ".layer" + std::to_string(l);
      ResidualLayer layer;
      layer.kernel = take(lp + ".conv.kernel", 3);
      layer.kernel_bias = take(lp + ".conv.bias", 1);
      layer.pointwise = take_affine(lp + ".pointwise");
      layer.dilation = std::size_t{1} << l;
      stage.layers.push_back(std::move(layer));
    }
    stage.classifier = take_affine(prefix + ".classifier");
    state.stages.push_back(std::move(stage));
  }
  state.predictor.first = take_affine("predictor.fc1");
  state.predictor.second = take_affine("predictor.fc2");
  state.predictor.third = take_affine("predictor.fc3");
  if (by_name.count("view_head.weight")) state.view_head = take_affine("view_head");
  if (!by_name.empty()) throw ArgumentError("unexpected parameter '" + by_name.begin()->first + "'");

  EncoderConfig& c = state.config;
  c.input_dim = state.stages[0].input.in_dim();
  c.embed_dim = state.stages[0].input.out_dim();
  c.num_classes = state.stages[0].classifier.out_dim();
  c.num_stages = stage_count;
  c.layers_per_stage = layer_count;
  c.kernel_size = layer_count ? state.stages[0].layers[0].kernel.dim(0) : 1;
  c.validate();

  // Every tensor must agree with the inferred configuration.
  const ModelState reference = initialize(c, 0, state.view_head ? state.view_head->out_dim() : 0);
  const auto expected = reference.named_parameters();
  const auto actual = state.named_parameters();
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (expected[i].tensor.shape() != actual[i].tensor.shape()) {
      throw ShapeError("parameter '" + actual[i].name + "' has shape " +
                       ad::shape_string(actual[i].tensor.shape()) + ", expected " +
                       ad::shape_string(expected[i].tensor.shape()));
    }
  }
  return state;
}

ModelState ModelState::clone() const {
  return from_named([this] {
    auto named = named_parameters();
    for (auto& n : named) n.tensor = n.tensor.detached_copy();
    return named;
  }());
}

bool ModelState::all_finite() const {
  for (const auto& n : named_parameters()) {
    for (const double v : n.tensor.values()) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

namespace {

ad::Tensor run_stage(const Stage& stage, const ad::Tensor& input, ad::Tensor& features) {
  ad::Tensor h = stage.input(input);
  for (const auto& layer : stage.layers) {
    ad::Tensor branch = ad::relu(ad::dilated_conv1d(h, layer.kernel, layer.kernel_bias, layer.dilation));
    h = ad::add(h, layer.pointwise(branch));
  }
  features = h;
  return stage.classifier(h);
}

}  // namespace

EncodeOutput encode(const ad::Tensor& features, const ModelState& state) {
  if (features.rank() != 2 || features.dim(1) != state.config.input_dim) {
    throw ShapeError("encode: features " + ad::shape_string(features.shape()) +
                     " do not match input_dim " + std::to_string(state.config.input_dim));
  }
  EncodeOutput out;
  ad::Tensor stage_input = features;
  for (std::size_t s = 0; s < state.stages.size(); ++s) {
    if (s > 0) stage_input = ad::softmax(out.logits_per_stage.back());
    out.logits_per_stage.push_back(run_stage(state.stages[s], stage_input, out.z));
  }
  return out;
}

EncodeOutput encode(const FeatureSequence& features, const ModelState& state) {
  if (features.frames == 0) throw ArgumentError("encode: empty feature sequence");
  return encode(features.to_tensor(), state);
}

ad::Tensor predictor_forward(const ad::Tensor& z, const ModelState& state) {
  if (z.rank() != 2 || z.dim(1) != state.config.embed_dim) {
    throw ShapeError("predictor: input " + ad::shape_string(z.shape()) + " does not match embed_dim " +
                     std::to_string(state.config.embed_dim));
  }
  const PredictorHead& p = state.predictor;
  return p.third(ad::gelu(p.second(ad::gelu(p.first(z)))));
}

LabelSequence predict_labels(const ad::Tensor& logits) {
  if (logits.rank() != 2) throw ShapeError("predict_labels: logits must be [T x C]");
  const std::size_t rows = logits.dim(0);
  const std::size_t cols = logits.dim(1);
  const auto v = logits.values();
  LabelSequence out(rows);
  for (std::size_t t = 0; t < rows; ++t) {
    const double* row = v.data() + t * cols;
    out[t] = static_cast<int>(std::max_element(row, row + cols) - row);
  }
  return out;
}

}  // namespace viewseg
