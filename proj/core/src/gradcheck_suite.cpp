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

#include "viewseg/gradcheck_suite.hpp"

#include <cmath>
#include <functional>

#include "viewseg/gradcheck.hpp"
#include "viewseg/losses.hpp"
#include "viewseg/model.hpp"
#include "viewseg/ops.hpp"
#include "viewseg/rng.hpp"

namespace viewseg {
namespace {

using ad::Shape;
using ad::Tensor;
using Fn = std::function<Tensor()>;

constexpr double kStep = 1e-7;

std::vector<double> normals(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

Tensor random_parameter(Rng& rng, Shape shape) {
  const std::size_t n = ad::shape_numel(shape);
  return Tensor::parameter(std::move(shape), normals(rng, n));
}

// Normal entries pushed at least `margin` away from every kink point.
Tensor away_from(Rng& rng, Shape shape, std::vector<double> kinks, double margin = 1e-2) {
  std::vector<double> v(ad::shape_numel(shape));
  for (auto& x : v) {
    bool ok = false;
    while (!ok) {
      x = rng.normal();
      ok = true;
      for (double k : kinks) ok = ok && std::abs(x - k) > margin;
    }
  }
  return Tensor::parameter(std::move(shape), std::move(v));
}

std::size_t dim(Rng& rng, std::size_t lo, std::size_t hi) {
  return static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)));
}

// Reduces any tensor to a scalar through a fixed random projection so every
// output coordinate carries a distinct weight.
struct Projector {
  std::vector<Tensor> weights;
  Rng* rng;
  std::size_t used = 0;
  Tensor operator()(const Tensor& t) {
    if (used == weights.size()) {
      weights.push_back(Tensor::constant(t.shape(), normals(*rng, t.numel())));
    }
    return ad::sum(ad::mul(t, weights[used++]));
  }
  void reset() { used = 0; }
};

double check(const Fn& f, std::vector<Tensor> inputs, double step = kStep) {
  return ad::finite_difference_check(f, inputs, step);
}

double check(const Fn& f, const Fn& reference, std::vector<Tensor> inputs, double step = kStep) {
  return ad::finite_difference_check(f, reference, inputs, step);
}

// Elementwise or whole-tensor op checked through a projection.
double unary_case(Rng& rng, const std::function<Tensor(const Tensor&)>& op, Tensor x) {
  Projector proj{{}, &rng};
  return check([&] { proj.reset(); return proj(op(x)); }, {x});
}

EncoderConfig tiny_config(Rng& rng) {
  EncoderConfig c;
  c.input_dim = dim(rng, 2, 4);
  c.embed_dim = dim(rng, 2, 6);
  c.num_classes = dim(rng, 2, 4);
  c.num_stages = 2;
  c.layers_per_stage = 2;
  c.kernel_size = 3;
  return c;
}

std::vector<int> random_labels(Rng& rng, std::size_t frames, std::size_t classes) {
  std::vector<int> labels(frames);
  for (auto& l : labels) l = static_cast<int>(rng.uniform_index(classes));
  return labels;
}

// TAS loss with the previous-frame log-probabilities frozen at `frozen`.
Tensor tas_reference(const std::vector<Tensor>& logits, std::span<const int> labels,
                     const std::vector<Tensor>& frozen, const LossWeights& w) {
  Tensor total;
  for (std::size_t s = 0; s < logits.size(); ++s) {
    Tensor stage = cross_entropy(logits[s], labels);
    const std::size_t frames = logits[s].dim(0);
    if (frames >= 2) {
      std::vector<std::size_t> current(frames - 1);
      for (std::size_t t = 1; t < frames; ++t) current[t - 1] = t;
      const Tensor delta = ad::sub(ad::gather_rows(ad::log_softmax(logits[s]), current), frozen[s]);
      const Tensor smoothing =
          ad::mean(ad::square(ad::clamp(delta, -w.smooth_clamp, w.smooth_clamp)));
      stage = ad::add(stage, ad::scale(smoothing, w.smooth_weight));
    }
    total = total.defined() ? ad::add(total, stage) : stage;
  }
  return total;
}

std::vector<Tensor> frozen_previous(const std::vector<Tensor>& logits) {
  std::vector<Tensor> out;
  for (const auto& l : logits) {
    const std::size_t frames = l.dim(0);
    if (frames < 2) {
      out.emplace_back();
      continue;
    }
    std::vector<std::size_t> previous(frames - 1);
    for (std::size_t t = 0; t + 1 < frames; ++t) previous[t] = t;
    out.push_back(ad::gather_rows(ad::log_softmax(l), previous).detached_copy());
  }
  return out;
}

// Symmetric similarity loss with each target branch frozen.
Tensor symmetric_reference(const Tensor& a, const Tensor& b, const Tensor& a_frozen,
                           const Tensor& b_frozen, const ModelState& state, SimilarityKind kind) {
  const Tensor forward = framewise_similarity(predictor_forward(a, state), b_frozen, kind);
  const Tensor reverse = framewise_similarity(predictor_forward(b, state), a_frozen, kind);
  return ad::scale(ad::add(forward, reverse), -0.5);
}

std::vector<Tensor> predictor_parameters(const ModelState& s) {
  return {s.predictor.first.weight,  s.predictor.first.bias,  s.predictor.second.weight,
          s.predictor.second.bias,   s.predictor.third.weight, s.predictor.third.bias};
}

std::vector<Tensor> logits_of(const EncodeOutput& e) { return e.logits_per_stage; }

// One training-style objective: TAS on two views, sequence loss and one
// action pair, all through the encoder with stop-gradient targets.
double total_loss_case(Rng& rng) {
  const EncoderConfig cfg = tiny_config(rng);
  const ModelState state = ModelState::initialize(cfg, rng.next());
  const std::size_t T = dim(rng, 4, 8);
  const Tensor xq = Tensor::constant({T, cfg.input_dim}, normals(rng, T * cfg.input_dim));
  const Tensor xr = Tensor::constant({T, cfg.input_dim}, normals(rng, T * cfg.input_dim));
  const auto labels = random_labels(rng, T, cfg.num_classes);
  // Action segments: rows [a0, a1) of q and [b0, b1) of r.
  const std::size_t a0 = rng.uniform_index(T - 1), a1 = dim(rng, a0 + 1, T);
  const std::size_t b0 = rng.uniform_index(T - 1), b1 = dim(rng, b0 + 1, T);
  auto rows = [](std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> r;
    for (std::size_t t = lo; t < hi; ++t) r.push_back(t);
    return r;
  };
  const auto rows_a = rows(a0, a1), rows_b = rows(b0, b1);
  const auto [align_a, align_b] = align_linear(rows_a.size(), rows_b.size());
  LossWeights w;
  SimilarityOptions options;

  auto f = [&] {
    const EncodeOutput q = encode(xq, state);
    const EncodeOutput r = encode(xr, state);
    const Tensor tas = ad::add(tas_loss(q.logits_per_stage, labels, w), tas_loss(r.logits_per_stage, labels, w));
    const Tensor seq = sequence_loss(q, r, state, options);
    const Tensor act = action_loss({ad::gather_rows(q.z, rows_a), 0}, {ad::gather_rows(r.z, rows_b), 0}, state, options);
    return total_loss(tas, seq, act, w);
  };

  const EncodeOutput q0 = encode(xq, state);
  const EncodeOutput r0 = encode(xr, state);
  const auto frozen_q = frozen_previous(logits_of(q0));
  const auto frozen_r = frozen_previous(logits_of(r0));
  const Tensor zq0 = q0.z.detached_copy(), zr0 = r0.z.detached_copy();
  const Tensor sa0 = ad::gather_rows(ad::gather_rows(zq0, rows_a), align_a);
  const Tensor sb0 = ad::gather_rows(ad::gather_rows(zr0, rows_b), align_b);

  auto reference = [&] {
    const EncodeOutput q = encode(xq, state);
    const EncodeOutput r = encode(xr, state);
    const Tensor tas = ad::add(tas_reference(logits_of(q), labels, frozen_q, w),
                               tas_reference(logits_of(r), labels, frozen_r, w));
    const Tensor seq = symmetric_reference(q.z, r.z, zq0, zr0, state, options.kind);
    const Tensor sa = ad::gather_rows(ad::gather_rows(q.z, rows_a), align_a);
    const Tensor sb = ad::gather_rows(ad::gather_rows(r.z, rows_b), align_b);
    const Tensor act = symmetric_reference(sa, sb, sa0, sb0, state, options.kind);
    return total_loss(tas, seq, act, w);
  };
  return check(f, reference, state.parameters());
}

using Case = std::function<double(Rng&)>;

std::vector<std::pair<std::string, Case>> cases() {
  std::vector<std::pair<std::string, Case>> out;
  auto add = [&](std::string name, Case c) { out.emplace_back(std::move(name), std::move(c)); };
  auto matrix = [](Rng& rng) { return random_parameter(rng, {dim(rng, 1, 5), dim(rng, 1, 5)}); };
  auto unary = [&](std::string name, std::function<Tensor(const Tensor&)> op) {
    add(std::move(name), [op, matrix](Rng& rng) { return unary_case(rng, op, matrix(rng)); });
  };

  add("matmul", [](Rng& rng) {
    const std::size_t n = dim(rng, 1, 5), k = dim(rng, 1, 5), m = dim(rng, 1, 5);
    Tensor a = random_parameter(rng, {n, k}), b = random_parameter(rng, {k, m});
    Projector proj{{}, &rng};
    return check([&] { proj.reset(); return proj(ad::matmul(a, b)); }, {a, b});
  });
  unary("transpose", [](const Tensor& x) { return ad::transpose(x); });
  unary("reshape", [](const Tensor& x) { return ad::reshape(x, {x.numel()}); });
  for (const char* mode : {"same", "scalar", "row"}) {
    for (const char* op : {"add", "sub", "mul"}) {
      add(std::string(op) + "_broadcast_" + mode, [mode = std::string(mode), op = std::string(op)](Rng& rng) {
        const std::size_t r = dim(rng, 1, 5), c = dim(rng, 1, 5);
        Tensor a = random_parameter(rng, {r, c});
        Tensor b = mode == "same" ? random_parameter(rng, {r, c})
                   : mode == "scalar" ? random_parameter(rng, {})
                                      : random_parameter(rng, {c});
        Projector proj{{}, &rng};
        return check(
            [&] {
              proj.reset();
              const Tensor y = op == "add" ? ad::add(a, b) : op == "sub" ? ad::sub(a, b) : ad::mul(a, b);
              return proj(y);
            },
            {a, b});
      });
    }
  }
  unary("scale", [](const Tensor& x) { return ad::scale(x, -1.7); });
  unary("add_scalar", [](const Tensor& x) { return ad::add_scalar(x, 0.3); });
  unary("neg", [](const Tensor& x) { return ad::neg(x); });
  unary("square", [](const Tensor& x) { return ad::square(x); });
  unary("exp", [](const Tensor& x) { return ad::exp(x); });
  add("log", [](Rng& rng) {
    Tensor x = random_parameter(rng, {dim(rng, 1, 5), dim(rng, 1, 5)});
    for (auto& v : x.mutable_values()) v = 0.2 + std::abs(v);
    return unary_case(rng, [](const Tensor& t) { return ad::log(t); }, x);
  });
  add("relu", [](Rng& rng) {
    return unary_case(rng, [](const Tensor& t) { return ad::relu(t); },
                      away_from(rng, {dim(rng, 1, 5), dim(rng, 1, 5)}, {0.0}));
  });
  unary("gelu", [](const Tensor& x) { return ad::gelu(x); });
  add("clamp", [](Rng& rng) {
    return unary_case(rng, [](const Tensor& t) { return ad::clamp(t, -0.5, 0.7); },
                      away_from(rng, {dim(rng, 1, 5), dim(rng, 1, 5)}, {-0.5, 0.7}));
  });
  unary("softmax", [](const Tensor& x) { return ad::softmax(x); });
  unary("log_softmax", [](const Tensor& x) { return ad::log_softmax(x); });
  unary("l2_normalize", [](const Tensor& x) { return ad::l2_normalize(x); });
  unary("sum", [](const Tensor& x) { return ad::sum(x); });
  unary("mean", [](const Tensor& x) { return ad::mean(x); });
  for (std::size_t axis : {0, 1}) {
    unary("sum_axis" + std::to_string(axis), [axis](const Tensor& x) { return ad::sum_axis(x, axis); });
    unary("mean_axis" + std::to_string(axis), [axis](const Tensor& x) { return ad::mean_axis(x, axis); });
    add("concat_axis" + std::to_string(axis), [axis](Rng& rng) {
      const std::size_t r = dim(rng, 1, 4), c = dim(rng, 1, 4);
      Tensor a = random_parameter(rng, {r, c});
      Tensor b = random_parameter(rng, axis == 0 ? Shape{dim(rng, 1, 4), c} : Shape{r, dim(rng, 1, 4)});
      Projector proj{{}, &rng};
      return check([&] { proj.reset(); const Tensor parts[] = {a, b}; return proj(ad::concat(parts, axis)); }, {a, b});
    });
  }
  add("gather_rows", [](Rng& rng) {
    Tensor x = random_parameter(rng, {dim(rng, 1, 6), dim(rng, 1, 4)});
    std::vector<std::size_t> rows(dim(rng, 1, 8));
    for (auto& r : rows) r = rng.uniform_index(x.dim(0));  // duplicates allowed
    return unary_case(rng, [rows](const Tensor& t) { return ad::gather_rows(t, rows); }, x);
  });
  add("pick", [](Rng& rng) {
    Tensor x = random_parameter(rng, {dim(rng, 1, 6), dim(rng, 1, 4)});
    std::vector<std::size_t> cols(x.dim(0));
    for (auto& c : cols) c = rng.uniform_index(x.dim(1));
    return unary_case(rng, [cols](const Tensor& t) { return ad::pick(t, cols); }, x);
  });
  add("adaptive_average_pool", [](Rng& rng) {
    const std::size_t T = dim(rng, 1, 8);
    const std::size_t L = dim(rng, 1, T);
    return unary_case(rng, [L](const Tensor& t) { return ad::adaptive_average_pool(t, L); },
                      random_parameter(rng, {T, dim(rng, 1, 4)}));
  });
  add("dilated_conv1d", [](Rng& rng) {
    const std::size_t T = dim(rng, 1, 8), cin = dim(rng, 1, 4), cout = dim(rng, 1, 4);
    const std::size_t k = 2 * dim(rng, 0, 2) + 1;
    const std::size_t dilation = std::size_t{1} << dim(rng, 0, 2);
    Tensor x = random_parameter(rng, {T, cin});
    Tensor kernel = random_parameter(rng, {k, cin, cout});
    Tensor bias = random_parameter(rng, {cout});
    Projector proj{{}, &rng};
    return check([&] { proj.reset(); return proj(ad::dilated_conv1d(x, kernel, bias, dilation)); },
                 {x, kernel, bias});
  });
  add("stop_gradient", [matrix](Rng& rng) {
    Tensor x = matrix(rng);
    const Tensor frozen = x.detached_copy();
    Projector proj{{}, &rng};
    return check([&] { proj.reset(); return ad::add(proj(ad::stop_gradient(x)), proj(ad::square(x))); },
                 [&] { proj.reset(); return ad::add(proj(frozen), proj(ad::square(x))); }, {x});
  });
  add("gradient_reversal", [matrix](Rng& rng) {
    Tensor x = matrix(rng);
    const double factor = rng.uniform(0.1, 2.0);
    Projector proj{{}, &rng};
    return check([&] { proj.reset(); return proj(ad::gradient_reversal(x, factor)); },
                 [&] { proj.reset(); return ad::scale(proj(x), -factor); }, {x});
  });

  add("cross_entropy", [](Rng& rng) {
    Tensor logits = random_parameter(rng, {dim(rng, 1, 8), dim(rng, 2, 4)});
    const auto labels = random_labels(rng, logits.dim(0), logits.dim(1));
    return check([&] { return cross_entropy(logits, labels); }, {logits});
  });
  add("tas_loss", [](Rng& rng) {
    const std::size_t T = dim(rng, 1, 8), C = dim(rng, 2, 4);
    std::vector<Tensor> logits;
    for (std::size_t s = 0, n = dim(rng, 1, 3); s < n; ++s) {
      Tensor l = random_parameter(rng, {T, C});
      for (auto& v : l.mutable_values()) v *= 2.0;
      logits.push_back(l);
    }
    const auto labels = random_labels(rng, T, C);
    LossWeights w;
    const auto frozen = frozen_previous(logits);
    return check([&] { return tas_loss(logits, labels, w); },
                 [&] { return tas_reference(logits, labels, frozen, w); }, logits);
  });
  for (auto kind : {SimilarityKind::kCosine, SimilarityKind::kMse, SimilarityKind::kKl}) {
    add("similarity_" + std::string(to_string(kind)), [kind](Rng& rng) {
      const std::size_t T = dim(rng, 1, 8), D = dim(rng, 1, 6);
      Tensor p = random_parameter(rng, {T, D}), z = random_parameter(rng, {T, D});
      return check([&] { return framewise_similarity(p, z, kind); }, {p, z});
    });
  }

  add("encode", [](Rng& rng) {
    const EncoderConfig cfg = tiny_config(rng);
    const ModelState state = ModelState::initialize(cfg, rng.next());
    Tensor x = random_parameter(rng, {dim(rng, 1, 8), cfg.input_dim});
    auto inputs = state.parameters();
    inputs.push_back(x);
    Projector proj{{}, &rng};
    return check(
        [&] {
          proj.reset();
          const EncodeOutput e = encode(x, state);
          Tensor total = proj(e.z);
          for (const auto& l : e.logits_per_stage) total = ad::add(total, proj(l));
          return total;
        },
        inputs);
  });
  add("predictor", [](Rng& rng) {
    const EncoderConfig cfg = tiny_config(rng);
    const ModelState state = ModelState::initialize(cfg, rng.next());
    Tensor z = random_parameter(rng, {dim(rng, 1, 8), cfg.embed_dim});
    auto inputs = predictor_parameters(state);
    inputs.push_back(z);
    Projector proj{{}, &rng};
    return check([&] { proj.reset(); return proj(predictor_forward(z, state)); }, inputs);
  });

  for (bool stop : {false, true}) {
    for (bool pooled : {false, true}) {
      const std::string suffix = std::string(stop ? "_stopgrad" : "_nostop") + (pooled ? "_pooled" : "");
      add("sequence_loss" + suffix, [stop, pooled](Rng& rng) {
        const EncoderConfig cfg = tiny_config(rng);
        const ModelState state = ModelState::initialize(cfg, rng.next());
        const std::size_t T = dim(rng, 1, 8);
        EncodeOutput q, r;
        q.z = random_parameter(rng, {T, cfg.embed_dim});
        r.z = random_parameter(rng, {T, cfg.embed_dim});
        SimilarityOptions options;
        options.stop_grad = stop;
        if (pooled) options.pool_len = dim(rng, 1, T);
        auto inputs = predictor_parameters(state);
        inputs.push_back(q.z);
        inputs.push_back(r.z);
        const Tensor zq0 = q.z.detached_copy(), zr0 = r.z.detached_copy();
        auto f = [&] { return sequence_loss(q, r, state, options); };
        if (!stop) return check(f, inputs);
        // Frozen-target form of the same loss.
        auto reference = [&] {
          auto directed = [&](const Tensor& src, const Tensor& target) {
            Tensor p = predictor_forward(src, state), t = target;
            if (options.pool_len) {
              p = ad::adaptive_average_pool(p, *options.pool_len);
              t = ad::adaptive_average_pool(t, *options.pool_len);
            }
            return framewise_similarity(p, t, options.kind);
          };
          return ad::scale(ad::add(directed(q.z, zr0), directed(r.z, zq0)), -0.5);
        };
        return check(f, reference, inputs);
      });
    }
  }
  add("action_loss", [](Rng& rng) {
    const EncoderConfig cfg = tiny_config(rng);
    const ModelState state = ModelState::initialize(cfg, rng.next());
    Tensor a = random_parameter(rng, {dim(rng, 1, 8), cfg.embed_dim});
    Tensor b = random_parameter(rng, {dim(rng, 1, 8), cfg.embed_dim});
    SimilarityOptions options;
    options.stop_grad = false;
    auto inputs = predictor_parameters(state);
    inputs.push_back(a);
    inputs.push_back(b);
    return check([&] { return action_loss({a, 1}, {b, 1}, state, options); }, inputs);
  });
  add("adversarial_view_loss", [](Rng& rng) {
    const std::size_t T = dim(rng, 1, 8), D = dim(rng, 1, 6), views = dim(rng, 2, 4);
    Tensor z = random_parameter(rng, {T, D});
    Affine head{random_parameter(rng, {D, views}), random_parameter(rng, {views})};
    const std::size_t view = rng.uniform_index(views);
    auto f = [&] { return adversarial_view_loss(z, view, head); };
    auto head_ce = [&] { return cross_entropy(head(z), std::vector<int>(T, static_cast<int>(view))); };
    // The head descends the view loss; the encoder side receives its negation.
    const double head_error = check(f, head_ce, {head.weight, head.bias});
    const double encoder_error = check(f, [&] { return ad::neg(head_ce()); }, {z});
    return std::max(head_error, encoder_error);
  });
  add("contrastive_loss", [](Rng& rng) {
    const std::size_t D = dim(rng, 1, 6);
    std::vector<ContrastiveEntry> batch;
    const std::size_t sequences = dim(rng, 1, 3);
    for (std::size_t s = 0; s < sequences; ++s) {
      for (int v = 0; v < 2; ++v) {
        batch.push_back({static_cast<int>(s), v, random_parameter(rng, {dim(rng, 1, 5), D})});
      }
    }
    std::vector<Tensor> inputs;
    for (const auto& e : batch) inputs.push_back(e.z);
    const double temperature = rng.uniform(0.1, 1.0);
    return check([&] { return contrastive_loss(batch, temperature); }, inputs);
  });
  add("total_loss", total_loss_case);
  return out;
}

}  // namespace

std::vector<GradcheckResult> run_gradcheck_suite(std::size_t trials, std::uint64_t seed) {
  std::vector<GradcheckResult> results;
  std::uint64_t stream = 0;
  for (const auto& [name, run] : cases()) {
    GradcheckResult r{name, trials, 0.0};
    for (std::size_t t = 0; t < trials; ++t) {
      Rng rng(derive_seed(seed, stream * 1000003 + t));
      const double error = run(rng);
      if (!(error <= r.max_error)) r.max_error = error;
    }
    ++stream;
    results.push_back(r);
  }
  return results;
}

}  // namespace viewseg
