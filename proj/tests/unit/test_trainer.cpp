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

#include "doctest.h"
#include "viewseg/adam.hpp"
#include "viewseg/checkpoint.hpp"
#include "viewseg/errors.hpp"
#include "viewseg/experiment.hpp"
#include "viewseg/generator.hpp"
#include "viewseg/ops.hpp"
#include "viewseg/trainer.hpp"

using namespace viewseg;
using ad::Tensor;

namespace {

GeneratorConfig tiny_generator() {
  GeneratorConfig g;
  g.num_sequences = 6;
  g.num_test_sequences = 2;
  g.mean_segments = 4;
  g.seed = 41;
  return g;
}

EncoderConfig tiny_model(const Dataset& d) {
  EncoderConfig m;
  m.input_dim = d.feature_dim;
  m.num_classes = d.num_classes;
  m.embed_dim = 8;
  m.layers_per_stage = 3;
  return m;
}

TrainConfig short_run(Method method) {
  TrainConfig c;
  c.method = method;
  c.epochs = 3;
  c.steps_per_epoch = 5;
  c.seed = 7;
  return c;
}

}  // namespace

TEST_CASE("first Adam step moves by the learning rate against the gradient sign") {
  Tensor x = Tensor::parameter({3}, {1.0, -2.0, 0.5});
  const std::vector<double> before(x.values().begin(), x.values().end());
  ad::backward(ad::sum(ad::mul(x, Tensor::constant({3}, {3.0, -0.2, 1e-3}))));
  std::vector<Tensor> params{x};
  AdamState state;
  AdamOptions o;
  REQUIRE(adam_step(params, state, o));
  CHECK(x.values()[0] - before[0] == doctest::Approx(-o.learning_rate).epsilon(1e-6));
  CHECK(x.values()[1] - before[1] == doctest::Approx(o.learning_rate).epsilon(1e-6));
  CHECK(x.values()[2] - before[2] == doctest::Approx(-o.learning_rate).epsilon(1e-4));
  CHECK(state.step == 1);
}

TEST_CASE("Adam refuses non-finite gradients") {
  Tensor x = Tensor::parameter({1}, {1.0});
  ad::backward(ad::sum(ad::mul(x, Tensor::constant({1}, {NAN}))));
  std::vector<Tensor> params{x};
  AdamState state;
  CHECK(!adam_step(params, state, {}));
  CHECK(x.values()[0] == 1.0);
  CHECK(state.step == 0);
}

TEST_CASE("method weights") {
  TrainConfig c;
  c.method = Method::kBaseline;
  CHECK(c.effective_weights().lambda == 0.0);
  CHECK(c.effective_weights().beta == 0.0);
  c.method = Method::kOursNoSeq;
  CHECK(c.effective_weights().lambda == 0.0);
  CHECK(c.effective_weights().beta == 0.2);
  c.method = Method::kOurs;
  CHECK(c.effective_weights().lambda == 0.5);
  CHECK(method_from_string("contrastive") == Method::kContrastive);
  CHECK_THROWS_AS(method_from_string("best"), ArgumentError);
  c.epochs = 0;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
}

TEST_CASE("degenerate data is learned quickly") {
  GeneratorConfig g;
  g.num_sequences = 10;
  g.num_test_sequences = 2;
  g.noise_sigma = 0.0;
  g.view_distortion = 0.0;
  g.seed = 41;
  const Dataset d = generate_synthetic(g);
  TrainConfig c;
  c.method = Method::kBaseline;
  c.epochs = 5;
  c.steps_per_epoch = 150;
  EncoderConfig m;
  m.input_dim = d.feature_dim;
  m.num_classes = d.num_classes;
  const auto result = train(c, m, d);
  CHECK(result.final_report.find("seen")->acc >= 99.0);
}

TEST_CASE("training is deterministic and the extra losses are inert at zero weight") {
  const Dataset d = generate_synthetic(tiny_generator());
  const auto base = train(short_run(Method::kBaseline), tiny_model(d), d);
  const auto again = train(short_run(Method::kBaseline), tiny_model(d), d);
  CHECK(serialize_checkpoint(base.state) == serialize_checkpoint(again.state));
  CHECK(train_log_to_csv(base.log) == train_log_to_csv(again.log));

  auto ours = short_run(Method::kOurs);
  ours.weights.lambda = 0.0;
  ours.weights.beta = 0.0;
  const auto inert = train(ours, tiny_model(d), d);
  CHECK(serialize_checkpoint(inert.state) == serialize_checkpoint(base.state));

  const auto active = train(short_run(Method::kOurs), tiny_model(d), d);
  CHECK(serialize_checkpoint(active.state) != serialize_checkpoint(base.state));
  for (const auto& e : active.log.epochs) {
    CHECK(std::isfinite(e.tas));
    CHECK(std::isfinite(e.seq));
    CHECK(std::isfinite(e.action));
  }
}

TEST_CASE("every method trains and logs one row per epoch") {
  const Dataset d = generate_synthetic(tiny_generator());
  for (auto m : {Method::kOursNoSeq, Method::kOursNoAction, Method::kAdvLoss, Method::kContrastive}) {
    auto c = short_run(m);
    c.eval_every = 2;
    const auto r = train(c, tiny_model(d), d);
    CHECK(r.log.epochs.size() == 3);
    CHECK(r.state.all_finite());
    CHECK(r.log.epochs[1].eval.has_value());
    CHECK(!r.log.epochs[0].eval.has_value());
    const std::string csv = train_log_to_csv(r.log);
    CHECK(csv.rfind("epoch,tas,seq,action,aux,", 0) == 0);
    CHECK(r.state.view_head.has_value() == (m == Method::kAdvLoss));
  }
}

TEST_CASE("bench grid rows") {
  BenchConfig b;
  b.generator = tiny_generator();
  b.model.embed_dim = 8;
  b.model.layers_per_stage = 2;
  b.train.epochs = 1;
  b.train.steps_per_epoch = 3;
  b.methods = {Method::kBaseline, Method::kOurs};
  b.seeds = {0, 1};
  std::size_t cells = 0;
  const auto result = run_bench(b, 2, [&](const BenchCell&) { ++cells; });
  CHECK(cells == 4);
  const std::string csv = bench_to_csv(result);
  std::size_t lines = 0;
  for (const char ch : csv) lines += ch == '\n';
  CHECK(lines == 1 + 2 * 3);
  CHECK(csv == bench_to_csv(run_bench(b, 1)));
}
