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
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "viewseg/errors.hpp"
#include "viewseg/gradcheck.hpp"
#include "viewseg/losses.hpp"
#include "viewseg/ops.hpp"

using namespace viewseg;
using ad::Tensor;

namespace {

std::vector<double> random_values(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-2.0, 2.0);
  return v;
}

ModelState identity_state(std::size_t dim) {
  EncoderConfig c;
  c.input_dim = dim;
  c.embed_dim = dim;
  c.num_classes = 2;
  c.num_stages = 1;
  c.layers_per_stage = 1;
  auto state = ModelState::initialize(c, 1);
  oracle::make_identity_predictor(state);
  return state;
}

EncodeOutput with_z(const Tensor& z) {
  EncodeOutput out;
  out.z = z;
  return out;
}

std::vector<double> row(const std::vector<double>& v, std::size_t t, std::size_t d) {
  return {v.begin() + static_cast<long>(t * d), v.begin() + static_cast<long>((t + 1) * d)};
}

}  // namespace

TEST_CASE("cosine similarity examples") {
  const Tensor p = Tensor::constant({1, 3}, {1, 2, 3});
  const Tensor z = Tensor::constant({1, 3}, {4, 5, 6});
  CHECK(framewise_similarity(p, z, SimilarityKind::kCosine).item() == doctest::Approx(0.974632).epsilon(1e-6));
  CHECK(framewise_similarity(p, p, SimilarityKind::kCosine).item() == doctest::Approx(1.0));
  const Tensor a = Tensor::constant({2, 2}, {1, 0, 0, 1});
  const Tensor b = Tensor::constant({2, 2}, {0, 1, 1, 0});
  CHECK(framewise_similarity(a, b, SimilarityKind::kCosine).item() == 0.0);
}

TEST_CASE("mse and kl similarities match direct evaluation") {
  Rng rng(2);
  const auto pv = random_values(rng, 12), zv = random_values(rng, 12);
  const Tensor p = Tensor::constant({4, 3}, pv), z = Tensor::constant({4, 3}, zv);
  double mse = 0.0;
  for (std::size_t i = 0; i < 12; ++i) mse += (pv[i] - zv[i]) * (pv[i] - zv[i]);
  CHECK(framewise_similarity(p, z, SimilarityKind::kMse).item() == doctest::Approx(-mse / 12));
  double kl = 0.0;
  for (std::size_t t = 0; t < 4; ++t) {
    double sp = 0.0, sz = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      sp += std::exp(pv[t * 3 + c]);
      sz += std::exp(zv[t * 3 + c]);
    }
    for (std::size_t c = 0; c < 3; ++c) {
      const double qz = std::exp(zv[t * 3 + c]) / sz, qp = std::exp(pv[t * 3 + c]) / sp;
      kl += qz * std::log(qz / qp);
    }
  }
  CHECK(framewise_similarity(p, z, SimilarityKind::kKl).item() == doctest::Approx(-kl / 4));
  CHECK(similarity_from_string("kl") == SimilarityKind::kKl);
  CHECK_THROWS_AS(similarity_from_string("dot"), ArgumentError);
}

TEST_CASE("align_linear examples") {
  using Pair = std::pair<std::vector<std::size_t>, std::vector<std::size_t>>;
  CHECK(align_linear(4, 4) == Pair{{0, 1, 2, 3}, {0, 1, 2, 3}});
  CHECK(align_linear(6, 3) == Pair{{0, 2, 4}, {0, 1, 2}});
  CHECK(align_linear(3, 6) == Pair{{0, 1, 2}, {0, 2, 4}});
  CHECK(align_linear(5, 2) == Pair{{0, 2}, {0, 1}});
}

TEST_CASE("sequence loss with identity predictor") {
  const auto state = identity_state(3);
  Rng rng(3);
  const auto zv = random_values(rng, 15);
  const Tensor z = Tensor::constant({5, 3}, zv);
  CHECK(sequence_loss(with_z(z), with_z(z), state, {}).item() == doctest::Approx(-1.0).epsilon(1e-12));
  const Tensor a = Tensor::constant({2, 3}, {1, 0, 0, 0, 2, 0});
  const Tensor b = Tensor::constant({2, 3}, {0, 3, 0, 0, 0, 1});
  CHECK(std::abs(sequence_loss(with_z(a), with_z(b), state, {}).item()) <= 1e-12);
  CHECK_THROWS_AS(sequence_loss(with_z(z), with_z(a), state, {}), ArgumentError);
}

TEST_CASE("action loss compares linearly aligned frames") {
  const auto state = identity_state(2);
  Rng rng(4);
  const auto av = random_values(rng, 12), bv = random_values(rng, 6);
  const SegmentEmbedding a{Tensor::constant({6, 2}, av), 1};
  const SegmentEmbedding b{Tensor::constant({3, 2}, bv), 1};
  double expected = 0.0;
  for (std::size_t t = 0; t < 3; ++t) expected += oracle::cosine(row(av, 2 * t, 2), row(bv, t, 2));
  expected = -expected / 3.0;
  CHECK(action_loss(a, b, state, {}).item() == doctest::Approx(expected).epsilon(1e-10));
  CHECK(action_loss(a, a, state, {}).item() == doctest::Approx(-1.0).epsilon(1e-12));
  const SegmentEmbedding other{Tensor::constant({3, 2}, bv), 0};
  CHECK_THROWS_AS(action_loss(a, other, state, {}), ArgumentError);
}

TEST_CASE("sequence and action losses are symmetric") {
  EncoderConfig c;
  c.input_dim = 4;
  c.embed_dim = 4;
  const auto state = ModelState::initialize(c, 5);
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor zq = Tensor::constant({7, 4}, random_values(rng, 28));
    const Tensor zr = Tensor::constant({7, 4}, random_values(rng, 28));
    for (auto kind : {SimilarityKind::kCosine, SimilarityKind::kMse, SimilarityKind::kKl}) {
      SimilarityOptions o;
      o.kind = kind;
      CHECK(sequence_loss(with_z(zq), with_z(zr), state, o).item() ==
            sequence_loss(with_z(zr), with_z(zq), state, o).item());
      const SegmentEmbedding a{zq, 0}, b{Tensor::constant({4, 4}, random_values(rng, 16)), 0};
      CHECK(action_loss(a, b, state, o).item() == action_loss(b, a, state, o).item());
    }
  }
}

TEST_CASE("stop-gradient removes the target-branch contribution") {
  EncoderConfig c;
  c.input_dim = 3;
  c.embed_dim = 3;
  const auto state = ModelState::initialize(c, 6);
  Rng rng(6);
  Tensor zq = Tensor::parameter({4, 3}, random_values(rng, 12));
  Tensor zr = Tensor::parameter({4, 3}, random_values(rng, 12));

  ad::backward(sequence_loss(with_z(zq), with_z(zr), state, {}));
  const std::vector<double> with_stop(zq.grad().begin(), zq.grad().end());
  zq.zero_grad();
  zr.zero_grad();

  // Only the branch where z_q is the source.
  const Tensor source_only = ad::scale(
      framewise_similarity(predictor_forward(zq, state), ad::stop_gradient(zr), SimilarityKind::kCosine), -0.5);
  ad::backward(source_only);
  CHECK(std::vector<double>(zq.grad().begin(), zq.grad().end()) == with_stop);
  zq.zero_grad();

  SimilarityOptions no_stop;
  no_stop.stop_grad = false;
  ad::backward(sequence_loss(with_z(zq), with_z(zr), state, no_stop));
  CHECK(std::vector<double>(zq.grad().begin(), zq.grad().end()) != with_stop);
}

TEST_CASE("tas loss on the hand example") {
  const Tensor logits = Tensor::constant({2, 2}, {2, 0, 0, 2});
  const std::vector<Tensor> stages{logits};
  const std::vector<int> labels{0, 1};
  LossWeights w;
  const double ce = -std::log(std::exp(2.0) / (std::exp(2.0) + 1.0));
  CHECK(ce == doctest::Approx(0.126928).epsilon(1e-6));
  CHECK(cross_entropy(logits, labels).item() == doctest::Approx(ce));
  // Every class moves by exactly 2 in log-probability.
  CHECK(tas_loss(stages, labels, w).item() == doctest::Approx(ce + 0.15 * 4.0));
  w.smooth_clamp = 1.0;
  CHECK(tas_loss(stages, labels, w).item() == doctest::Approx(ce + 0.15 * 1.0));
}

TEST_CASE("tas loss of constant logits") {
  const std::vector<int> labels{0, 2, 1, 1};
  const std::vector<Tensor> uniform{Tensor::zeros({4, 3}), Tensor::zeros({4, 3})};
  CHECK(tas_loss(uniform, labels, {}).item() == doctest::Approx(2 * std::log(3.0)));
  std::vector<double> constant;
  for (int t = 0; t < 4; ++t) constant.insert(constant.end(), {0.3, -1.2, 2.0});
  const std::vector<Tensor> stages{Tensor::constant({4, 3}, constant)};
  LossWeights no_smooth;
  no_smooth.smooth_weight = 0.0;
  CHECK(tas_loss(stages, labels, {}).item() == tas_loss(stages, labels, no_smooth).item());
  CHECK_THROWS_AS(tas_loss(stages, std::vector<int>{0, 3, 1, 1}, {}), ArgumentError);
}

TEST_CASE("total loss arithmetic") {
  const LossWeights w;
  CHECK(total_loss(Tensor::scalar(2), Tensor::scalar(-1), Tensor::scalar(-1), w).item() == doctest::Approx(1.3));
  LossWeights zero;
  zero.lambda = 0;
  zero.beta = 0;
  CHECK(total_loss(Tensor::scalar(2), Tensor::scalar(-1), Tensor::scalar(-1), zero).item() == 2.0);
  CHECK(total_loss(Tensor::scalar(2), Tensor(), Tensor(), w).item() == 2.0);
}

TEST_CASE("adversarial view loss") {
  Affine head{Tensor::parameter({3, 4}, std::vector<double>(12, 0.0)), Tensor::parameter({4}, std::vector<double>(4, 0.0))};
  Rng rng(7);
  const auto zv = random_values(rng, 15);
  Tensor z = Tensor::parameter({5, 3}, zv);
  CHECK(adversarial_view_loss(z, 2, head).item() == doctest::Approx(std::log(4.0)));
  CHECK_THROWS_AS(adversarial_view_loss(z, 4, head), ArgumentError);

  for (auto& v : head.weight.mutable_values()) v = rng.uniform(-1, 1);
  ad::backward(adversarial_view_loss(z, 1, head));
  const std::vector<double> reversed(z.grad().begin(), z.grad().end());
  z.zero_grad();
  ad::backward(cross_entropy(head(z), std::vector<int>(5, 1)));
  for (std::size_t i = 0; i < reversed.size(); ++i) CHECK(reversed[i] == doctest::Approx(-z.grad()[i]));
}

TEST_CASE("contrastive loss matches the direct sum") {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<ContrastiveEntry> batch;
    std::vector<oracle::Entry> reference;
    const int seqs[4] = {0, 0, 1, 1}, views[4] = {0, 1, 0, 2};
    for (int i = 0; i < 4; ++i) {
      const auto v = random_values(rng, 3 * 4);
      batch.push_back({seqs[i], views[i], Tensor::constant({3, 4}, v)});
      std::vector<double> pooled(4, 0.0);
      for (std::size_t t = 0; t < 3; ++t) {
        for (std::size_t d = 0; d < 4; ++d) pooled[d] += v[t * 4 + d] / 3.0;
      }
      reference.push_back({seqs[i], views[i], pooled});
    }
    CHECK(std::abs(contrastive_loss(batch, 0.07).item() - oracle::info_nce(reference, 0.07)) <= 1e-10);
    auto scaled = batch;
    for (auto& e : scaled) e.z = ad::scale(e.z, 3.0);
    CHECK(contrastive_loss(scaled, 0.07).item() == doctest::Approx(contrastive_loss(batch, 0.07).item()).epsilon(1e-12));
  }
}

TEST_CASE("contrastive loss edge cases") {
  const Tensor v = Tensor::constant({2, 2}, {1, 2, 3, 4});
  const std::vector<ContrastiveEntry> pair{{0, 0, v}, {0, 1, v}};
  CHECK(std::abs(contrastive_loss(pair, 1.0).item()) <= 1e-15);
  const std::vector<ContrastiveEntry> lonely{{0, 0, v}, {1, 1, v}};
  CHECK_THROWS_AS(contrastive_loss(lonely, 1.0), ArgumentError);
}

TEST_CASE("loss weight validation") {
  LossWeights w;
  w.lambda = -1;
  CHECK_THROWS_AS(w.validate(), ArgumentError);
  w = {};
  w.smooth_clamp = 0;
  CHECK_THROWS_AS(w.validate(), ArgumentError);
}
