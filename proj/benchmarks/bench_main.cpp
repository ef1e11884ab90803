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

#include <benchmark/benchmark.h>

#include "viewseg/generator.hpp"
#include "viewseg/losses.hpp"
#include "viewseg/metrics.hpp"
#include "viewseg/model.hpp"
#include "viewseg/ops.hpp"
#include "viewseg/rng.hpp"
#include "viewseg/trainer.hpp"

using namespace viewseg;
using ad::Tensor;

namespace {

std::vector<double> random_values(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

FeatureSequence random_features(std::size_t frames, std::size_t dim) {
  Rng rng(1);
  return FeatureSequence(frames, dim, random_values(rng, frames * dim));
}

void BM_DilatedConv(benchmark::State& state) {
  const auto frames = static_cast<std::size_t>(state.range(0));
  const std::size_t channels = 16;
  Rng rng(2);
  const Tensor x = Tensor::constant({frames, channels}, random_values(rng, frames * channels));
  const Tensor k = Tensor::parameter({3, channels, channels}, random_values(rng, 3 * channels * channels));
  const Tensor b = Tensor::parameter({channels}, random_values(rng, channels));
  for (auto _ : state) {
    Tensor y = ad::dilated_conv1d(x, k, b, 4);
    ad::backward(ad::sum(y));
    benchmark::DoNotOptimize(y.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(frames));
}
BENCHMARK(BM_DilatedConv)->Arg(100)->Arg(400);

void BM_EncodeForward(benchmark::State& state) {
  const auto frames = static_cast<std::size_t>(state.range(0));
  const auto model = ModelState::initialize(EncoderConfig{}, 3);
  const auto x = random_features(frames, 16);
  for (auto _ : state) {
    const auto out = encode(x, model);
    benchmark::DoNotOptimize(out.z.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(frames));
}
BENCHMARK(BM_EncodeForward)->Arg(100)->Arg(400);

void BM_TrainStepLosses(benchmark::State& state) {
  const auto model = ModelState::initialize(EncoderConfig{}, 4);
  const auto xq = random_features(120, 16);
  const auto xr = random_features(120, 16);
  const std::vector<int> labels(120, 2);
  for (auto _ : state) {
    const auto eq = encode(xq, model);
    const auto er = encode(xr, model);
    const auto tas = ad::add(tas_loss(eq.logits_per_stage, labels, {}), tas_loss(er.logits_per_stage, labels, {}));
    const auto seq = sequence_loss(eq, er, model, {});
    ad::backward(total_loss(tas, seq, Tensor(), {}));
    for (auto& p : model.parameters()) p.zero_grad();
  }
}
BENCHMARK(BM_TrainStepLosses)->Unit(benchmark::kMillisecond);

void BM_SegmentalMetrics(benchmark::State& state) {
  const auto frames = static_cast<std::size_t>(state.range(0));
  Rng rng(5);
  std::vector<int> gt(frames), pred(frames);
  int label = 0;
  for (std::size_t t = 0; t < frames; ++t) {
    if (t % 37 == 0) label = static_cast<int>(rng.uniform_index(8));
    gt[t] = label;
    pred[t] = rng.uniform() < 0.05 ? static_cast<int>(rng.uniform_index(8)) : label;
  }
  for (auto _ : state) benchmark::DoNotOptimize(score_recording(pred, gt));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(frames));
}
BENCHMARK(BM_SegmentalMetrics)->Arg(400)->Arg(4000);

void BM_Generate(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(generate_synthetic(GeneratorConfig{}).recordings.size());
}
BENCHMARK(BM_Generate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
