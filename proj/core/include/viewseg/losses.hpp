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
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "viewseg/model.hpp"
#include "viewseg/sequence.hpp"
#include "viewseg/tensor.hpp"

namespace viewseg {

struct LossWeights {
  double lambda = 0.5;  // sequence loss
  double beta = 0.2;    // action loss
  double smooth_weight = 0.15;
  double smooth_clamp = 4.0;

  void validate() const;
  bool operator==(const LossWeights&) const = default;
};

enum class SimilarityKind { kCosine, kMse, kKl };

std::string_view to_string(SimilarityKind kind);
SimilarityKind similarity_from_string(std::string_view name);

// Mean per-frame similarity of two [T x D] streams; larger means more alike
// for every kind:
//   cosine  mean_t <p_t, z_t> / (max(|p_t|, 1e-8) max(|z_t|, 1e-8))
//   mse     -mean over all elements of (p - z)^2
//   kl      -mean_t KL(softmax(z_t) || softmax(p_t))
ad::Tensor framewise_similarity(const ad::Tensor& p, const ad::Tensor& z, SimilarityKind kind);

struct SimilarityOptions {
  SimilarityKind kind = SimilarityKind::kCosine;
  // Treat the target (z) branch as a constant.
  bool stop_grad = true;
  // Pool both streams to this many frames before comparing (clamped to the
  // available length).
  std::optional<std::size_t> pool_len;
};

// -1/2 [S(P(z_q), z_r) + S(P(z_r), z_q)] for two synchronized views of one
// sequence. Throws ArgumentError when the frame counts differ.
ad::Tensor sequence_loss(const EncodeOutput& enc_q, const EncodeOutput& enc_r,
                         const ModelState& state, const SimilarityOptions& options);

// Index lists for comparing a length-a stream with a length-b stream: the
// shorter side is taken frame by frame, the longer one subsampled at
// floor(t * T_long / m), m = min(a, b).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> align_linear(std::size_t length_a,
                                                                           std::size_t length_b);

// Embeddings of one action segment.
struct SegmentEmbedding {
  ad::Tensor z;  // [T_s x D]
  int label = 0;
};

// Symmetric action-level counterpart of sequence_loss. The two segments are
// compared over min(T_a, T_b) linearly aligned frames, or after pooling both
// to the same length when options.pool_len is set.
ad::Tensor action_loss(const SegmentEmbedding& a, const SegmentEmbedding& b,
                       const ModelState& state, const SimilarityOptions& options);

// Sum over stages of mean frame-wise cross-entropy plus
// smooth_weight * mean_{t>=1,c} min(clamp, |log p_{t,c} - log p_{t-1,c}|)^2,
// with frame t-1 held constant.
ad::Tensor tas_loss(std::span<const ad::Tensor> logits_per_stage, std::span<const int> labels,
                    const LossWeights& weights);

// Mean frame-wise cross-entropy of [T x C] logits against labels.
ad::Tensor cross_entropy(const ad::Tensor& logits, std::span<const int> labels);

// tas + lambda * seq + beta * action. Undefined seq/action terms count as 0.
ad::Tensor total_loss(const ad::Tensor& tas, const ad::Tensor& seq, const ad::Tensor& action,
                      const LossWeights& weights);

// Cross-entropy of a linear view classifier on z behind a gradient reversal:
// the head is trained to identify the view, the encoder receives the negated
// gradient.
ad::Tensor adversarial_view_loss(const ad::Tensor& z, std::size_t view_index, const Affine& view_head);

struct ContrastiveEntry {
  int sequence_id = 0;
  int view_id = 0;
  ad::Tensor z;  // [T x D], globally average-pooled inside the loss
};

// InfoNCE over the batch: positives share the sequence id and differ in view
// id; every other entry is a negative. Anchors without a positive are
// skipped; throws ArgumentError if that leaves none.
ad::Tensor contrastive_loss(std::span<const ContrastiveEntry> batch, double temperature = 0.07);

}  // namespace viewseg
