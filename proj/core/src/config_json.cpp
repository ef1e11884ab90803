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

#include "viewseg/config_json.hpp"

#include <set>

#include "viewseg/errors.hpp"

namespace viewseg::json_config {
namespace {

// Reads named fields into a struct, rejecting unknown keys.
class FieldReader {
 public:
  FieldReader(const Json& j, std::string context) : j_(j), context_(std::move(context)) {
    if (!j.is_object()) throw ArgumentError(context_ + ": expected a JSON object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ArgumentError(context_ + "." + key + ": " + e.what());
    }
  }

  template <typename T>
  void read_optional(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    if (it->is_null()) {
      out.reset();
      return;
    }
    T value{};
    try {
      value = it->template get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ArgumentError(context_ + "." + key + ": " + e.what());
    }
    out = value;
  }

  const Json* sub(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ArgumentError(context_ + ": unknown field '" + key + "'");
    }
  }

 private:
  const Json& j_;
  std::string context_;
  std::set<std::string> seen_;
};

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json parse(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ArgumentError(source + ": " + e.what());
  }
}

Json to_json(const GeneratorConfig& c) {
  Json groups = Json::array();
  for (const auto& g : c.unseen_groups) {
    groups.push_back({{"name", g.name}, {"views", g.views}, {"view_distortion", optional_json(g.view_distortion)}});
  }
  return {{"num_sequences", c.num_sequences},
          {"num_test_sequences", c.num_test_sequences},
          {"num_classes", c.num_classes},
          {"feature_dim", c.feature_dim},
          {"seen_views", c.seen_views},
          {"unseen_groups", groups},
          {"mean_segments", c.mean_segments},
          {"duration_min", c.duration_min},
          {"duration_max", c.duration_max},
          {"noise_sigma", c.noise_sigma},
          {"view_distortion", c.view_distortion},
          {"view_offset_scale", c.view_offset_scale},
          {"offset_jitter", c.offset_jitter},
          {"unseen_nuisance_gain", c.unseen_nuisance_gain},
          {"nuisance_rank", c.nuisance_rank},
          {"seed", c.seed}};
}

GeneratorConfig generator_from_json(const Json& j) {
  GeneratorConfig c;
  FieldReader r(j, "generator");
  r.read("num_sequences", c.num_sequences);
  r.read("num_test_sequences", c.num_test_sequences);
  r.read("num_classes", c.num_classes);
  r.read("feature_dim", c.feature_dim);
  r.read("seen_views", c.seen_views);
  if (const Json* groups = r.sub("unseen_groups")) {
    if (!groups->is_array()) throw ArgumentError("generator.unseen_groups: expected an array");
    c.unseen_groups.clear();
    for (const auto& g : *groups) {
      UnseenGroupConfig group;
      FieldReader gr(g, "generator.unseen_groups[]");
      gr.read("name", group.name);
      gr.read("views", group.views);
      gr.read_optional("view_distortion", group.view_distortion);
      gr.finish();
      c.unseen_groups.push_back(group);
    }
  }
  r.read("mean_segments", c.mean_segments);
  r.read("duration_min", c.duration_min);
  r.read("duration_max", c.duration_max);
  r.read("noise_sigma", c.noise_sigma);
  r.read("view_distortion", c.view_distortion);
  r.read("view_offset_scale", c.view_offset_scale);
  r.read("offset_jitter", c.offset_jitter);
  r.read("unseen_nuisance_gain", c.unseen_nuisance_gain);
  r.read("nuisance_rank", c.nuisance_rank);
  r.read("seed", c.seed);
  r.finish();
  c.validate();
  return c;
}

Json to_json(const SplitSpec& s) {
  Json groups = Json::object();
  for (const auto& [name, views] : s.unseen_view_groups) groups[name] = views;
  return {{"seen_views", s.seen_views}, {"unseen_view_groups", groups}, {"test_sequences", s.test_sequences}};
}

SplitSpec split_from_json(const Json& j) {
  SplitSpec s;
  FieldReader r(j, "split");
  r.read("seen_views", s.seen_views);
  if (const Json* groups = r.sub("unseen_view_groups")) {
    if (!groups->is_object()) throw ArgumentError("split.unseen_view_groups: expected an object");
    for (const auto& [name, views] : groups->items()) {
      try {
        s.unseen_view_groups[name] = views.get<std::vector<int>>();
      } catch (const nlohmann::json::exception& e) {
        throw ArgumentError("split.unseen_view_groups." + name + ": " + e.what());
      }
    }
  }
  r.read("test_sequences", s.test_sequences);
  r.finish();
  s.validate();
  return s;
}

Json to_json(const EncoderConfig& c) {
  return {{"input_dim", c.input_dim},   {"embed_dim", c.embed_dim},
          {"num_classes", c.num_classes}, {"num_stages", c.num_stages},
          {"layers_per_stage", c.layers_per_stage}, {"kernel_size", c.kernel_size}};
}

EncoderConfig encoder_from_json(const Json& j) {
  EncoderConfig c;
  FieldReader r(j, "model");
  r.read("input_dim", c.input_dim);
  r.read("embed_dim", c.embed_dim);
  r.read("num_classes", c.num_classes);
  r.read("num_stages", c.num_stages);
  r.read("layers_per_stage", c.layers_per_stage);
  r.read("kernel_size", c.kernel_size);
  r.finish();
  c.validate();
  return c;
}

Json to_json(const LossWeights& w) {
  return {{"lambda", w.lambda}, {"beta", w.beta}, {"smooth_weight", w.smooth_weight}, {"smooth_clamp", w.smooth_clamp}};
}

LossWeights weights_from_json(const Json& j) {
  LossWeights w;
  FieldReader r(j, "weights");
  r.read("lambda", w.lambda);
  r.read("beta", w.beta);
  r.read("smooth_weight", w.smooth_weight);
  r.read("smooth_clamp", w.smooth_clamp);
  r.finish();
  w.validate();
  return w;
}

Json to_json(const TrainConfig& c) {
  return {{"method", std::string(to_string(c.method))},
          {"weights", to_json(c.weights)},
          {"epochs", c.epochs},
          {"steps_per_epoch", c.steps_per_epoch},
          {"learning_rate", c.adam.learning_rate},
          {"adam_beta1", c.adam.beta1},
          {"adam_beta2", c.adam.beta2},
          {"adam_eps", c.adam.eps},
          {"seed", c.seed},
          {"stop_grad", c.stop_grad},
          {"similarity", std::string(to_string(c.similarity))},
          {"seq_pool_len", optional_json(c.seq_pool_len)},
          {"action_pool_len", optional_json(c.action_pool_len)},
          {"sync_shift", c.sync_shift},
          {"allow_same_view", c.allow_same_view},
          {"action_pairs_per_step", c.action_pairs_per_step},
          {"aux_weight", c.aux_weight},
          {"temperature", c.temperature},
          {"contrastive_batch", c.contrastive_batch},
          {"eval_every", c.eval_every}};
}

TrainConfig train_from_json(const Json& j) {
  TrainConfig c;
  FieldReader r(j, "train");
  std::string method(to_string(c.method));
  r.read("method", method);
  c.method = method_from_string(method);
  if (const Json* w = r.sub("weights")) c.weights = weights_from_json(*w);
  r.read("epochs", c.epochs);
  r.read("steps_per_epoch", c.steps_per_epoch);
  r.read("learning_rate", c.adam.learning_rate);
  r.read("adam_beta1", c.adam.beta1);
  r.read("adam_beta2", c.adam.beta2);
  r.read("adam_eps", c.adam.eps);
  r.read("seed", c.seed);
  r.read("stop_grad", c.stop_grad);
  std::string similarity(to_string(c.similarity));
  r.read("similarity", similarity);
  c.similarity = similarity_from_string(similarity);
  r.read_optional("seq_pool_len", c.seq_pool_len);
  r.read_optional("action_pool_len", c.action_pool_len);
  r.read("sync_shift", c.sync_shift);
  r.read("allow_same_view", c.allow_same_view);
  r.read("action_pairs_per_step", c.action_pairs_per_step);
  r.read("aux_weight", c.aux_weight);
  r.read("temperature", c.temperature);
  r.read("contrastive_batch", c.contrastive_batch);
  r.read("eval_every", c.eval_every);
  r.finish();
  c.validate();
  return c;
}

}  // namespace viewseg::json_config
