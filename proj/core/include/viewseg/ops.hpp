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
#include <span>
#include <vector>

#include "viewseg/tensor.hpp"

// Differentiable primitives. Every function returns a new node; when any
// input requires a gradient the node records a backward rule, otherwise it
// is a plain constant. Shape errors throw viewseg::ShapeError, domain errors
// viewseg::ArgumentError.
namespace viewseg::ad {

// [m x k] * [k x n]
Tensor matmul(const Tensor& a, const Tensor& b);
// [m x n] -> [n x m]
Tensor transpose(const Tensor& a);
Tensor reshape(const Tensor& a, Shape shape);

// Binary elementwise ops. `b` may have the same shape as `a`, be a scalar,
// or match a trailing suffix of a's shape (e.g. a bias row [n] over [m x n]).
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

Tensor scale(const Tensor& a, double factor);
Tensor add_scalar(const Tensor& a, double value);
Tensor neg(const Tensor& a);
Tensor square(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);

Tensor relu(const Tensor& a);
// Exact form x * Phi(x) with the Gaussian CDF.
Tensor gelu(const Tensor& a);
// Gradient passes only where lo < x < hi.
Tensor clamp(const Tensor& a, double lo, double hi);

// Over the last axis.
Tensor softmax(const Tensor& a);
Tensor log_softmax(const Tensor& a);
// x / max(||x||, eps) over the last axis.
Tensor l2_normalize(const Tensor& a, double eps = 1e-8);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
// Removes `axis` from the shape.
Tensor sum_axis(const Tensor& a, std::size_t axis);
Tensor mean_axis(const Tensor& a, std::size_t axis);

Tensor concat(std::span<const Tensor> parts, std::size_t axis);

// Rows of a rank-2 tensor, in the given order (repeats allowed).
Tensor gather_rows(const Tensor& a, std::span<const std::size_t> rows);
// out[t] = a[t, columns[t]] for a rank-2 tensor; result has shape [rows].
Tensor pick(const Tensor& a, std::span<const std::size_t> columns);

// Identity forward; contributes no gradient to its input.
Tensor stop_gradient(const Tensor& a);
// Identity forward; backward multiplies the incoming gradient by -factor.
Tensor gradient_reversal(const Tensor& a, double factor = 1.0);

// Pools a [T x D] tensor to [L x D]; window t averages rows
// [floor(t*T/L), floor((t+1)*T/L)).
Tensor adaptive_average_pool(const Tensor& a, std::size_t target_length);

// Same-length dilated convolution over time.
//   input  [T x C_in]
//   kernel [k x C_in x C_out], k odd
//   bias   [C_out]
// out[t,o] = bias[o] + sum_{j,c} input[t + (j - (k-1)/2) * dilation, c] * kernel[j,c,o]
// with zero padding outside [0, T).
Tensor dilated_conv1d(const Tensor& input, const Tensor& kernel, const Tensor& bias,
                      std::size_t dilation);

}  // namespace viewseg::ad
