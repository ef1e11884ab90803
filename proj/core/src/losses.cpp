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

#include "viewseg/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "viewseg/errors.hpp"
#include "viewseg/ops.hpp"

namespace viewseg {

void LossWeights::validate() const {
  for (const double w : {lambda, beta, smooth_weight, smooth_clamp}) {
    if (!std::isfinite(w) || w < 0.0) throw ArgumentError("loss weights must be finite and >= 0");
  }
  if (smooth_clamp <= 0.0) throw ArgumentError("smooth_clamp must be positive");
}

std::string_view to_string(SimilarityKind kind) {
  switch (kind) {
    case SimilarityKind::kCosine: return "cosine";
    case SimilarityKind::kMse: return "mse";
    case SimilarityKind::kKl: return "kl";
  }
  return "cosine";
}

SimilarityKind similarity_from_string(std::string_view name) {
  if (name == "cosine") return SimilarityKind::kCosine;
  if (name == "mse") return SimilarityKind::kMse;
  if (name == "kl") return SimilarityKind::kKl;
  throw ArgumentError("unknown similarity '" + std::string(name) + "'");
}

ad::Tensor framewise_similarity(const ad::Tensor& p, const ad::Tensor& z, SimilarityKind kind) {
  if (p.shape() != z.shape() || p.rank() != 2) {
    throw ShapeError("similarity: " + ad::shape_string(p.shape()) + " vs " +
                     ad::shape_string(z.shape()));
  }
  switch (kind) {
    case SimilarityKind::kCosine: {
      const auto per_frame = ad::sum_axis(ad::mul(ad::l2_normalize(p), ad::l2_normalize(z)), 1);
      return ad::mean(per_frame);
    }
    case SimilarityKind::kMse:
      return ad::neg(ad::mean(ad::square(ad::sub(p, z))));
    case SimilarityKind::kKl: {
      const auto log_target = ad::log_softmax(z);
      const auto divergence = ad::mul(ad::exp(log_target), ad::sub(log_target, ad::log_softmax(p)));
      return ad::neg(ad::mean(ad::sum_axis(divergence, 1)));
    }
  }
  throw ArgumentError("unknown similarity kind");
}

namespace {

// One direction of the symmetric loss: S(predictor(source), target).
ad::Tensor directed_similarity(const ad::Tensor& source, const ad::Tensor& target,
                               const ModelState& state, const SimilarityOptions& options) {
  ad::Tensor p = predictor_forward(source, state);
  ad::Tensor z = options.stop_grad ? ad::stop_gradient(target) : target;
  if (options.pool_len) {
    const std::size_t length = std::min(*options.pool_len, std::min(p.dim(0), z.dim(0)));
    p = ad::adaptive_average_pool(p, length);
    z = ad::adaptive_average_pool(z, length);
  }
  return framewise_similarity(p, z, options.kind);
}

ad::Tensor symmetric_loss(const ad::Tensor& a, const ad::Tensor& b, const ModelState& state,
                          const SimilarityOptions& options) {
  const ad::Tensor forward = directed_similarity(a, b, state, options);
  const ad::Tensor reverse = directed_similarity(b, a, state, options);
  return ad::scale(ad::add(forward, reverse), -0.5);
}

}  // namespace

ad::Tensor sequence_loss(const EncodeOutput& enc_q, const EncodeOutput& enc_r,
                         const ModelState& state, const SimilarityOptions& options) {
  if (enc_q.z.dim(0) != enc_r.z.dim(0)) {
    throw ArgumentError("sequence_loss: views have " + std::to_string(enc_q.z.dim(0)) + " and " +
                        std::to_string(enc_r.z.dim(0)) + " frames");
  }
  return symmetric_loss(enc_q.z, enc_r.z, state, options);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> align_linear(std::size_t length_a,
                                                                           std::size_t length_b) {
  if (length_a == 0 || length_b == 0) throw ArgumentError("align_linear: empty segment");
  const std::size_t m = std::min(length_a, length_b);
  auto indices = [m](std::size_t length) {
    std::vector<std::size_t> out(m);
    for (std::size_t t = 0; t < m; ++t) out[t] = t * length / m;
    return out;
  };
  return {indices(length_a), indices(length_b)};
}

ad::Tensor action_loss(const SegmentEmbedding& a, const SegmentEmbedding& b,
                       const ModelState& state, const SimilarityOptions& options) {
  if (a.label != b.label) {
    throw ArgumentError("action_loss: labels " + std::to_string(a.label) + " and " +
                        std::to_string(b.label) + " differ");
  }
  if (options.pool_len) return symmetric_loss(a.z, b.z, state, options);
  const auto [index_a, index_b] = align_linear(a.z.dim(0), b.z.dim(0));
  const ad::Tensor aligned_a = ad::gather_rows(a.z, index_a);
  const ad::Tensor aligned_b = ad::gather_rows(b.z, index_b);
  return symmetric_loss(aligned_a, aligned_b, state, options);
}

ad::Tensor cross_entropy(const ad::Tensor& logits, std::span<const int> labels) {
  if (logits.rank() != 2 || logits.dim(0) != labels.size()) {
    throw ShapeError("cross_entropy: logits " + ad::shape_string(logits.shape()) + " for " +
                     std::to_string(labels.size()) + " labels");
  }
  const std::size_t classes = logits.dim(1);
  std::vector<std::size_t> columns(labels.size());
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (labels[t] < 0 || static_cast<std::size_t>(labels[t]) >= classes) {
      throw ArgumentError("cross_entropy: label " + std::to_string(labels[t]) + " outside [0, " +
                          std::to_string(classes) + ")");
    }
    columns[t] = static_cast<std::size_t>(labels[t]);
  }
  return ad::neg(ad::mean(ad::pick(ad::log_softmax(logits), columns)));
}

ad::Tensor tas_loss(std::span<const ad::Tensor> logits_per_stage, std::span<const int> labels,
                    const LossWeights& weights) {
  if (logits_per_stage.empty()) throw ArgumentError("tas_loss: no stages");
  ad::Tensor total;
  for (const auto& logits : logits_per_stage) {
    ad::Tensor stage = cross_entropy(logits, labels);
    const std::size_t frames = logits.dim(0);
    if (frames >= 2) {
      const ad::Tensor log_probs = ad::log_softmax(logits);
      std::vector<std::size_t> current(frames - 1);
      std::vector<std::size_t> previous(frames - 1);
      for (std::size_t t = 1; t < frames; ++t) {
        current[t - 1] = t;
        previous[t - 1] = t - 1;
      }
      const ad::Tensor delta = ad::sub(ad::gather_rows(log_probs, current),
                                       ad::stop_gradient(ad::gather_rows(log_probs, previous)));
      const double c = weights.smooth_clamp;
      const ad::Tensor smoothing = ad::mean(ad::square(ad::clamp(delta, -c, c)));
      stage = ad::add(stage, ad::scale(smoothing, weights.smooth_weight));
    }
    total = total.defined() ? ad::add(total, stage) : stage;
  }
  return total;
}

ad::Tensor total_loss(const ad::Tensor& tas, const ad::Tensor& seq, const ad::Tensor& action,
                      const LossWeights& weights) {
  ad::Tensor out = tas;
  if (seq.defined()) out = ad::add(out, ad::scale(seq, weights.lambda));
  if (action.defined()) out = ad::add(out, ad::scale(action, weights.beta));
  return out;
}

ad::Tensor adversarial_view_loss(const ad::Tensor& z, std::size_t view_index, const Affine& view_head) {
  if (view_index >= view_head.out_dim()) {
    throw ArgumentError("adversarial_view_loss: view index " + std::to_string(view_index) +
                        " outside [0, " + std::to_string(view_head.out_dim()) + ")");
  }
  const ad::Tensor logits = view_head(ad::gradient_reversal(z, 1.0));
  const std::vector<int> labels(z.dim(0), static_cast<int>(view_index));
  return cross_entropy(logits, labels);
}

ad::Tensor contrastive_loss(std::span<const ContrastiveEntry> batch, double temperature) {
  if (batch.size() < 2) throw ArgumentError("contrastive_loss: batch needs at least 2 entries");
  if (!(temperature > 0.0)) throw ArgumentError("contrastive_loss: temperature must be positive");
  const std::size_t n = batch.size();
  std::vector<ad::Tensor> pooled;
  for (const auto& e : batch) {
    const std::size_t d = e.z.dim(1);
    pooled.push_back(ad::reshape(ad::mean_axis(e.z, 0), {1, d}));
  }
  const ad::Tensor embeddings = ad::l2_normalize(ad::concat(pooled, 0));
  const ad::Tensor logits = ad::scale(ad::matmul(embeddings, ad::transpose(embeddings)), 1.0 / temperature);

  std::vector<std::size_t> anchors;
  std::vector<double> positive_mask;
  std::vector<double> candidate_mask;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> pos(n, 0.0);
    std::vector<double> all(n, 0.0);
    bool has_positive = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      all[j] = 1.0;
      if (batch[j].sequence_id == batch[i].sequence_id && batch[j].view_id != batch[i].view_id) {
        pos[j] = 1.0;
        has_positive = true;
      }
    }
    if (!has_positive) continue;
    anchors.push_back(i);
    positive_mask.insert(positive_mask.end(), pos.begin(), pos.end());
    candidate_mask.insert(candidate_mask.end(), all.begin(), all.end());
  }
  if (anchors.empty()) throw ArgumentError("contrastive_loss: no anchor has a positive");
  const std::size_t count = anchors.size();
  const ad::Tensor scores = ad::exp(ad::gather_rows(logits, anchors));
  const ad::Tensor positives =
      ad::sum_axis(ad::mul(scores, ad::Tensor::constant({count, n}, std::move(positive_mask))), 1);
  const ad::Tensor candidates =
      ad::sum_axis(ad::mul(scores, ad::Tensor::constant({count, n}, std::move(candidate_mask))), 1);
  return ad::mean(ad::sub(ad::log(candidates), ad::log(positives)));
}

}  // namespace viewseg
