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

#include <functional>
#include <span>

#include "viewseg/tensor.hpp"

namespace viewseg::ad {

// Compares reverse-mode gradients of a scalar function against central
// differences. `f` is re-evaluated after each in-place perturbation of an
// input coordinate, so it must read the inputs it closes over and be
// deterministic. Returns
//   max over coordinates of |analytic - numeric| / max(1, |numeric|).
// Gradients of `inputs` are cleared before and after the check.
double finite_difference_check(const std::function<Tensor()>& f, std::span<Tensor> inputs,
                               double step = 1e-5);

// Same, but the numeric side differentiates `reference` instead of `f`. Used
// for objectives containing stop-gradient boundaries: `reference` evaluates
// the objective with the stopped quantities frozen at their current values,
// which is the function whose gradient reverse mode actually computes.
double finite_difference_check(const std::function<Tensor()>& f,
                               const std::function<Tensor()>& reference,
                               std::span<Tensor> inputs, double step = 1e-5);

}  // namespace viewseg::ad
