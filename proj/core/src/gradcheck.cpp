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

#include "viewseg/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "viewseg/errors.hpp"

namespace viewseg::ad {

double finite_difference_check(const std::function<Tensor()>& f, std::span<Tensor> inputs,
                               double step) {
  return finite_difference_check(f, f, inputs, step);
}

double finite_difference_check(const std::function<Tensor()>& f,
                               const std::function<Tensor()>& reference,
                               std::span<Tensor> inputs, double step) {
  if (!(step > 0.0 && step <= 1e-2)) {
    throw ArgumentError("finite_difference_check: step must lie in (0, 1e-2]");
  }
  for (auto& input : inputs) input.zero_grad();
  backward(f());

  std::vector<std::vector<double>> analytic;
  analytic.reserve(inputs.size());
  for (auto& input : inputs) {
    if (input.has_grad()) {
      analytic.emplace_back(input.grad().begin(), input.grad().end());
    } else {
      analytic.emplace_back(input.numel(), 0.0);
    }
  }

  double worst = 0.0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    auto values = inputs[k].mutable_values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + step;
      const double plus = reference().item();
      values[i] = saved - step;
      const double minus = reference().item();
      values[i] = saved;
      const double numeric = (plus - minus) / (2.0 * step);
      const double error =
          std::abs(analytic[k][i] - numeric) / std::max(1.0, std::abs(numeric));
      if (!(error <= worst)) worst = error;  // propagates NaN
    }
  }
  for (auto& input : inputs) input.zero_grad();
  return worst;
}

}  // namespace viewseg::ad
