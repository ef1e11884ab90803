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
#include "viewseg/errors.hpp"
#include "viewseg/gradcheck.hpp"
#include "viewseg/losses.hpp"
#include "viewseg/ops.hpp"
#include "viewseg/rng.hpp"

using viewseg::Rng;
using viewseg::ad::Tensor;
namespace ad = viewseg::ad;

namespace {

std::vector<double> random_values(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-2.0, 2.0);
  return v;
}

std::vector<double> as_vector(const Tensor& t) { return {t.values().begin(), t.values().end()}; }

}  // namespace

TEST_CASE("dilated_conv1d on a hand-computed example") {
  const Tensor x = Tensor::constant({4, 1}, {1, 2, 3, 4});
  const Tensor k = Tensor::constant({3, 1, 1}, {1, 1, 1});
  const Tensor b = Tensor::constant({1}, {0});
  CHECK(as_vector(ad::dilated_conv1d(x, k, b, 1)) == std::vector<double>{3, 6, 9, 7});
}

TEST_CASE("dilated_conv1d keeps the input length") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t t = 1 + rng.uniform_index(20);
    const std::size_t cin = 1 + rng.uniform_index(3);
    const std::size_t cout = 1 + rng.uniform_index(3);
    const std::size_t k = 2 * rng.uniform_index(3) + 1;
    const std::size_t dilation = std::size_t{1} << rng.uniform_index(4);
    const Tensor x = Tensor::constant({t, cin}, random_values(rng, t * cin));
    const Tensor w = Tensor::constant({k, cin, cout}, random_values(rng, k * cin * cout));
    const Tensor b = Tensor::constant({cout}, random_values(rng, cout));
    const Tensor y = ad::dilated_conv1d(x, w, b, dilation);
    CHECK(y.dim(0) == t);
    CHECK(y.dim(1) == cout);
  }
}

TEST_CASE("adaptive_average_pool uses floor windows") {
  const Tensor x = Tensor::constant({6, 1}, {1, 2, 3, 4, 5, 6});
  CHECK(as_vector(ad::adaptive_average_pool(x, 3)) == std::vector<double>{1.5, 3.5, 5.5});
}

TEST_CASE("adaptive_average_pool preserves the mean of window means") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t t = 1 + rng.uniform_index(30);
    const std::size_t l = 1 + rng.uniform_index(t);
    const std::vector<double> values = random_values(rng, t);
    const Tensor pooled = ad::adaptive_average_pool(Tensor::constant({t, 1}, values), l);
    double window_means = 0.0;
    for (std::size_t w = 0; w < l; ++w) {
      const std::size_t lo = w * t / l, hi = (w + 1) * t / l;
      double s = 0.0;
      for (std::size_t i = lo; i < hi; ++i) s += values[i];
      window_means += s / static_cast<double>(hi - lo);
    }
    CHECK(ad::mean(pooled).item() == doctest::Approx(window_means / static_cast<double>(l)).epsilon(1e-12));

    const Tensor whole = ad::adaptive_average_pool(Tensor::constant({t, 1}, values), 1);
    double total = 0.0;
    for (const double v : values) total += v;
    CHECK(std::abs(whole.item() - total / static_cast<double>(t)) <= 1e-12);
  }
}

TEST_CASE("stop_gradient blocks every gradient") {
  Rng rng(5);
  Tensor x = Tensor::parameter({3, 4}, random_values(rng, 12));
  const Tensor root = ad::sum(ad::square(ad::mul(ad::stop_gradient(x), ad::stop_gradient(x))));
  ad::backward(root);
  for (const double g : x.grad()) CHECK(g == 0.0);
}

TEST_CASE("gradient_reversal negates and scales") {
  Tensor x = Tensor::parameter({2}, {0.5, -1.5});
  ad::backward(ad::sum(ad::square(ad::gradient_reversal(x, 2.0))));
  CHECK(x.grad()[0] == doctest::Approx(-2.0 * 2 * 0.5));
  CHECK(x.grad()[1] == doctest::Approx(-2.0 * 2 * -1.5));
}

TEST_CASE("normalize-then-dot gradient matches finite differences") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor x = Tensor::parameter({5}, random_values(rng, 5));
    const Tensor c = Tensor::constant({5}, random_values(rng, 5));
    std::vector<Tensor> inputs{x};
    const double err = ad::finite_difference_check([&] { return ad::sum(ad::mul(ad::l2_normalize(x), c)); },
                                                   inputs, 1e-5);
    CHECK(err <= 1e-6);
  }
}

TEST_CASE("cross-entropy gradient matches finite differences") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor logits = Tensor::parameter({6, 4}, random_values(rng, 24));
    std::vector<int> labels(6);
    for (auto& l : labels) l = static_cast<int>(rng.uniform_index(4));
    std::vector<Tensor> inputs{logits};
    const double err = ad::finite_difference_check([&] { return viewseg::cross_entropy(logits, labels); }, inputs);
    CHECK(err <= 1e-6);
  }
}

TEST_CASE("tape is topologically ordered") {
  Rng rng(8);
  Tensor a = Tensor::parameter({2, 3}, random_values(rng, 6));
  Tensor b = Tensor::parameter({3, 2}, random_values(rng, 6));
  const Tensor root = ad::sum(ad::gelu(ad::matmul(a, b)));
  const auto tape = ad::Tape::record(root);
  CHECK(tape.is_topologically_ordered());
  CHECK(tape.entries.back() == root.node());
}

TEST_CASE("leaf gradients accumulate across backward calls") {
  Tensor x = Tensor::parameter({1}, {3.0});
  ad::backward(ad::sum(ad::square(x)));
  ad::backward(ad::sum(ad::square(x)));
  CHECK(x.grad()[0] == doctest::Approx(12.0));
}

TEST_CASE("broadcasting accepts scalars and trailing suffixes only") {
  const Tensor m = Tensor::constant({2, 3}, {1, 2, 3, 4, 5, 6});
  CHECK(as_vector(ad::add(m, Tensor::constant({3}, {10, 20, 30}))) ==
        std::vector<double>{11, 22, 33, 14, 25, 36});
  CHECK(as_vector(ad::mul(m, Tensor::scalar(2))) == std::vector<double>{2, 4, 6, 8, 10, 12});
  CHECK_THROWS_AS(ad::add(m, Tensor::constant({2}, {1, 2})), viewseg::ShapeError);
  CHECK_THROWS_AS(ad::matmul(m, m), viewseg::ShapeError);
}

TEST_CASE("backward requires a scalar root") {
  Tensor x = Tensor::parameter({2}, {1, 2});
  CHECK_THROWS_AS(ad::backward(ad::square(x)), viewseg::ArgumentError);
}

TEST_CASE("l2_normalize leaves zero rows at zero") {
  const Tensor z = ad::l2_normalize(Tensor::constant({2, 2}, {0, 0, 3, 4}));
  CHECK(as_vector(z) == std::vector<double>{0, 0, 0.6, 0.8});
}
