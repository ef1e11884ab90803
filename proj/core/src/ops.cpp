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

#include "viewseg/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "viewseg/errors.hpp"

namespace viewseg::ad {
namespace {

using Backward = std::function<void(Node&)>;

Tensor make_result(Shape shape, std::vector<double> value, std::vector<NodePtr> inputs,
                   Backward rule, const char* op) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  node->op = op;
  const bool tracked = std::any_of(inputs.begin(), inputs.end(),
                                   [](const NodePtr& n) { return n->requires_grad; });
  if (tracked) {
    node->requires_grad = true;
    node->inputs = std::move(inputs);
    node->backward = std::move(rule);
  }
  return Tensor(std::move(node));
}

void require_rank(const Tensor& a, std::size_t rank, const char* op) {
  if (a.rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) +
                     ", got " + shape_string(a.shape()));
  }
}

// b broadcasts over a when it has a's shape, is a single value, or equals a
// trailing suffix of a's shape. In every case element i of a pairs with
// element i % numel(b) of b.
void check_broadcast(const Tensor& a, const Tensor& b, const char* op) {
  if (b.numel() == 1 || a.shape() == b.shape()) return;
  const auto& as = a.shape();
  const auto& bs = b.shape();
  if (bs.size() <= as.size() && std::equal(bs.rbegin(), bs.rend(), as.rbegin())) return;
  throw ShapeError(std::string(op) + ": cannot broadcast " + shape_string(bs) + " onto " +
                   shape_string(as));
}

// Unary elementwise op with derivative expressed through (x, y).
template <typename Forward, typename Derivative>
Tensor unary(const Tensor& a, const char* op, Forward f, Derivative df) {
  const auto x = a.values();
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  return make_result(a.shape(), std::move(y), {a.node()},
                     [df](Node& self) {
                       Node& in = *self.inputs[0];
                       if (!in.requires_grad) return;
                       auto& g = in.ensure_grad();
                       for (std::size_t i = 0; i < g.size(); ++i) {
                         g[i] += self.grad[i] * df(in.value[i], self.value[i]);
                       }
                     },
                     op);
}

struct AxisSplit {
  std::size_t outer = 1;
  std::size_t extent = 1;
  std::size_t inner = 1;
};

AxisSplit split_axis(const Shape& shape, std::size_t axis) {
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.extent = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  const std::size_t m = a.dim(0);
  const std::size_t k = a.dim(1);
  const std::size_t n = b.dim(1);
  if (b.dim(0) != k) {
    throw ShapeError("matmul: inner dimensions differ, " + shape_string(a.shape()) + " * " +
                     shape_string(b.shape()));
  }
  const auto av = a.values();
  const auto bv = b.values();
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* orow = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      const double* brow = bv.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  return make_result({m, n}, std::move(out), {a.node(), b.node()},
                     [m, k, n](Node& self) {
                       Node& A = *self.inputs[0];
                       Node& B = *self.inputs[1];
                       const auto& g = self.grad;
                       if (A.requires_grad) {
                         auto& ga = A.ensure_grad();
                         for (std::size_t i = 0; i < m; ++i) {
                           for (std::size_t p = 0; p < k; ++p) {
                             double acc = 0.0;
                             const double* grow = g.data() + i * n;
                             const double* brow = B.value.data() + p * n;
                             for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
                             ga[i * k + p] += acc;
                           }
                         }
                       }
                       if (B.requires_grad) {
                         auto& gb = B.ensure_grad();
                         for (std::size_t i = 0; i < m; ++i) {
                           const double* grow = g.data() + i * n;
                           for (std::size_t p = 0; p < k; ++p) {
                             const double aip = A.value[i * k + p];
                             double* gbrow = gb.data() + p * n;
                             for (std::size_t j = 0; j < n; ++j) gbrow[j] += aip * grow[j];
                           }
                         }
                       }
                     },
                     "matmul");
}

Tensor transpose(const Tensor& a) {
  require_rank(a, 2, "transpose");
  const std::size_t m = a.dim(0);
  const std::size_t n = a.dim(1);
  const auto x = a.values();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = x[i * n + j];
  return make_result({n, m}, std::move(out), {a.node()},
                     [m, n](Node& self) {
                       Node& in = *self.inputs[0];
                       auto& g = in.ensure_grad();
                       for (std::size_t i = 0; i < m; ++i)
                         for (std::size_t j = 0; j < n; ++j) g[i * n + j] += self.grad[j * m + i];
                     },
                     "transpose");
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_numel(shape) != a.numel()) {
    throw ShapeError("reshape: " + shape_string(a.shape()) + " to " + shape_string(shape));
  }
  std::vector<double> out(a.values().begin(), a.values().end());
  return make_result(std::move(shape), std::move(out), {a.node()},
                     [](Node& self) {
                       auto& g = self.inputs[0]->ensure_grad();
                       for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
                     },
                     "reshape");
}

Tensor add(const Tensor& a, const Tensor& b) {
  check_broadcast(a, b, "add");
  const auto x = a.values();
  const auto y = b.values();
  const std::size_t period = y.size();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i % period];
  return make_result(a.shape(), std::move(out), {a.node(), b.node()},
                     [period](Node& self) {
                       Node& A = *self.inputs[0];
                       Node& B = *self.inputs[1];
                       if (A.requires_grad) {
                         auto& g = A.ensure_grad();
                         for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
                       }
                       if (B.requires_grad) {
                         auto& g = B.ensure_grad();
                         for (std::size_t i = 0; i < self.grad.size(); ++i)
                           g[i % period] += self.grad[i];
                       }
                     },
                     "add");
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_broadcast(a, b, "sub");
  const auto x = a.values();
  const auto y = b.values();
  const std::size_t period = y.size();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i % period];
  return make_result(a.shape(), std::move(out), {a.node(), b.node()},
                     [period](Node& self) {
                       Node& A = *self.inputs[0];
                       Node& B = *self.inputs[1];
                       if (A.requires_grad) {
                         auto& g = A.ensure_grad();
                         for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
                       }
                       if (B.requires_grad) {
                         auto& g = B.ensure_grad();
                         for (std::size_t i = 0; i < self.grad.size(); ++i)
                           g[i % period] -= self.grad[i];
                       }
                     },
                     "sub");
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_broadcast(a, b, "mul");
  const auto x = a.values();
  const auto y = b.values();
  const std::size_t period = y.size();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i % period];
  return make_result(a.shape(), std::move(out), {a.node(), b.node()},
                     [period](Node& self) {
                       Node& A = *self.inputs[0];
                       Node& B = *self.inputs[1];
                       if (A.requires_grad) {
                         auto& g = A.ensure_grad();
                         for (std::size_t i = 0; i < g.size(); ++i)
                           g[i] += self.grad[i] * B.value[i % period];
                       }
                       if (B.requires_grad) {
                         auto& g = B.ensure_grad();
                         for (std::size_t i = 0; i < self.grad.size(); ++i)
                           g[i % period] += self.grad[i] * A.value[i];
                       }
                     },
                     "mul");
}

Tensor scale(const Tensor& a, double factor) {
  return unary(
      a, "scale", [factor](double x) { return factor * x; },
      [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& a, double value) {
  return unary(
      a, "add_scalar", [value](double x) { return x + value; },
      [](double, double) { return 1.0; });
}

Tensor neg(const Tensor& a) { return scale(a, -1.0); }

Tensor square(const Tensor& a) {
  return unary(
      a, "square", [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor exp(const Tensor& a) {
  return unary(
      a, "exp", [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
  return unary(
      a, "log", [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor relu(const Tensor& a) {
  return unary(
      a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor gelu(const Tensor& a) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return unary(
      a, "gelu", [](double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); },
      [inv_sqrt_2pi](double x, double) {
        const double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
        const double pdf = inv_sqrt_2pi * std::exp(-0.5 * x * x);
        return cdf + x * pdf;
      });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  if (!(lo <= hi)) throw ArgumentError("clamp: lo must not exceed hi");
  return unary(
      a, "clamp", [lo, hi](double x) { return std::clamp(x, lo, hi); },
      [lo, hi](double x, double) { return (x > lo && x < hi) ? 1.0 : 0.0; });
}

Tensor softmax(const Tensor& a) {
  if (a.rank() == 0) throw ShapeError("softmax: rank-0 input");
  const std::size_t cols = a.shape().back();
  const std::size_t rows = a.numel() / cols;
  const auto x = a.values();
  std::vector<double> y(x.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = x.data() + r * cols;
    double* out = y.data() + r * cols;
    const double peak = *std::max_element(in, in + cols);
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) total += (out[c] = std::exp(in[c] - peak));
    for (std::size_t c = 0; c < cols; ++c) out[c] /= total;
  }
  return make_result(a.shape(), std::move(y), {a.node()},
                     [rows, cols](Node& self) {
                       auto& g = self.inputs[0]->ensure_grad();
                       for (std::size_t r = 0; r < rows; ++r) {
                         const double* y = self.value.data() + r * cols;
                         const double* gy = self.grad.data() + r * cols;
                         double dot = 0.0;
                         for (std::size_t c = 0; c < cols; ++c) dot += gy[c] * y[c];
                         for (std::size_t c = 0; c < cols; ++c)
                           g[r * cols + c] += y[c] * (gy[c] - dot);
                       }
                     },
                     "softmax");
}

Tensor log_softmax(const Tensor& a) {
  if (a.rank() == 0) throw ShapeError("log_softmax: rank-0 input");
  const std::size_t cols = a.shape().back();
  const std::size_t rows = a.numel() / cols;
  const auto x = a.values();
  std::vector<double> y(x.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = x.data() + r * cols;
    double* out = y.data() + r * cols;
    const double peak = *std::max_element(in, in + cols);
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) total += std::exp(in[c] - peak);
    const double lse = peak + std::log(total);
    for (std::size_t c = 0; c < cols; ++c) out[c] = in[c] - lse;
  }
  return make_result(a.shape(), std::move(y), {a.node()},
                     [rows, cols](Node& self) {
                       auto& g = self.inputs[0]->ensure_grad();
                       for (std::size_t r = 0; r < rows; ++r) {
                         const double* y = self.value.data() + r * cols;
                         const double* gy = self.grad.data() + r * cols;
                         double total = 0.0;
                         for (std::size_t c = 0; c < cols; ++c) total += gy[c];
                         for (std::size_t c = 0; c < cols; ++c)
                           g[r * cols + c] += gy[c] - std::exp(y[c]) * total;
                       }
                     },
                     "log_softmax");
}

Tensor l2_normalize(const Tensor& a, double eps) {
  if (a.rank() == 0) throw ShapeError("l2_normalize: rank-0 input");
  const std::size_t cols = a.shape().back();
  const std::size_t rows = a.numel() / cols;
  const auto x = a.values();
  std::vector<double> y(x.size());
  std::vector<double> norms(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double ss = 0.0;
    for (std::size_t c = 0; c < cols; ++c) ss += x[r * cols + c] * x[r * cols + c];
    norms[r] = std::sqrt(ss);
    const double denom = std::max(norms[r], eps);
    for (std::size_t c = 0; c < cols; ++c) y[r * cols + c] = x[r * cols + c] / denom;
  }
  return make_result(a.shape(), std::move(y), {a.node()},
                     [rows, cols, eps, norms = std::move(norms)](Node& self) {
                       Node& in = *self.inputs[0];
                       auto& g = in.ensure_grad();
                       for (std::size_t r = 0; r < rows; ++r) {
                         const double n = norms[r];
                         const double* xr = in.value.data() + r * cols;
                         const double* gy = self.grad.data() + r * cols;
                         if (n <= eps) {
                           // Floored rows scale linearly.
                           for (std::size_t c = 0; c < cols; ++c) g[r * cols + c] += gy[c] / eps;
                           continue;
                         }
                         double gx = 0.0;
                         for (std::size_t c = 0; c < cols; ++c) gx += gy[c] * xr[c];
                         const double radial = gx / (n * n * n);
                         for (std::size_t c = 0; c < cols; ++c)
                           g[r * cols + c] += gy[c] / n - xr[c] * radial;
                       }
                     },
                     "l2_normalize");
}

Tensor sum(const Tensor& a) {
  double total = 0.0;
  for (const double v : a.values()) total += v;
  return make_result({}, {total}, {a.node()},
                     [](Node& self) {
                       auto& g = self.inputs[0]->ensure_grad();
                       for (auto& gi : g) gi += self.grad[0];
                     },
                     "sum");
}

Tensor mean(const Tensor& a) { return scale(sum(a), 1.0 / static_cast<double>(a.numel())); }

Tensor sum_axis(const Tensor& a, std::size_t axis) {
  if (axis >= a.rank()) {
    throw ArgumentError("sum_axis: axis " + std::to_string(axis) + " out of range for " +
                        shape_string(a.shape()));
  }
  const AxisSplit s = split_axis(a.shape(), axis);
  Shape out_shape = a.shape();
  out_shape.erase(out_shape.begin() + static_cast<std::ptrdiff_t>(axis));
  const auto x = a.values();
  std::vector<double> out(s.outer * s.inner, 0.0);
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t e = 0; e < s.extent; ++e)
      for (std::size_t i = 0; i < s.inner; ++i)
        out[o * s.inner + i] += x[(o * s.extent + e) * s.inner + i];
  return make_result(std::move(out_shape), std::move(out), {a.node()},
                     [s](Node& self) {
                       auto& g = self.inputs[0]->ensure_grad();
                       for (std::size_t o = 0; o < s.outer; ++o)
                         for (std::size_t e = 0; e < s.extent; ++e)
                           for (std::size_t i = 0; i < s.inner; ++i)
                             g[(o * s.extent + e) * s.inner + i] += self.grad[o * s.inner + i];
                     },
                     "sum_axis");
}

Tensor mean_axis(const Tensor& a, std::size_t axis) {
  const auto extent = static_cast<double>(a.dim(axis));
  return scale(sum_axis(a, axis), 1.0 / extent);
}

Tensor concat(std::span<const Tensor> parts, std::size_t axis) {
  if (parts.empty()) throw ArgumentError("concat: no inputs");
  const Shape& first = parts.front().shape();
  if (axis >= first.size()) throw ArgumentError("concat: axis out of range");
  std::size_t total_extent = 0;
  std::vector<std::size_t> extents;
  std::vector<NodePtr> inputs;
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    if (s.size() != first.size()) throw ShapeError("concat: rank mismatch");
    for (std::size_t d = 0; d < s.size(); ++d) {
      if (d != axis && s[d] != first[d]) {
        throw ShapeError("concat: " + shape_string(s) + " vs " + shape_string(first));
      }
    }
    extents.push_back(s[axis]);
    total_extent += s[axis];
    inputs.push_back(p.node());
  }
  const AxisSplit base = split_axis(first, axis);
  Shape out_shape = first;
  out_shape[axis] = total_extent;
  std::vector<double> out(base.outer * total_extent * base.inner);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto x = parts[k].values();
    const std::size_t chunk = extents[k] * base.inner;
    for (std::size_t o = 0; o < base.outer; ++o) {
      std::copy_n(x.data() + o * chunk, chunk,
                  out.data() + o * total_extent * base.inner + offset);
    }
    offset += chunk;
  }
  return make_result(std::move(out_shape), std::move(out), std::move(inputs),
                     [base, extents, total_extent](Node& self) {
                       std::size_t offset = 0;
                       for (std::size_t k = 0; k < self.inputs.size(); ++k) {
                         Node& in = *self.inputs[k];
                         const std::size_t chunk = extents[k] * base.inner;
                         if (in.requires_grad) {
                           auto& g = in.ensure_grad();
                           for (std::size_t o = 0; o < base.outer; ++o) {
                             const double* src = self.grad.data() +
                                                 o * total_extent * base.inner + offset;
                             for (std::size_t i = 0; i < chunk; ++i) g[o * chunk + i] += src[i];
                           }
                         }
                         offset += chunk;
                       }
                     },
                     "concat");
}

Tensor gather_rows(const Tensor& a, std::span<const std::size_t> rows) {
  require_rank(a, 2, "gather_rows");
  if (rows.empty()) throw ArgumentError("gather_rows: empty index list");
  const std::size_t n = a.dim(0);
  const std::size_t cols = a.dim(1);
  const auto x = a.values();
  std::vector<std::size_t> index(rows.begin(), rows.end());
  std::vector<double> out(index.size() * cols);
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] >= n) {
      throw ArgumentError("gather_rows: row " + std::to_string(index[r]) + " out of range " +
                          std::to_string(n));
    }
    std::copy_n(x.data() + index[r] * cols, cols, out.data() + r * cols);
  }
  const std::size_t count = index.size();
  return make_result({count, cols}, std::move(out), {a.node()},
                     [index = std::move(index), cols](Node& self) {
                       auto& g = self.inputs[0]->ensure_grad();
                       for (std::size_t r = 0; r < index.size(); ++r)
                         for (std::size_t c = 0; c < cols; ++c)
                           g[index[r] * cols + c] += self.grad[r * cols + c];
                     },
                     "gather_rows");
}

Tensor pick(const Tensor& a, std::span<const std::size_t> columns) {
  require_rank(a, 2, "pick");
  const std::size_t rows = a.dim(0);
  const std::size_t cols = a.dim(1);
  if (columns.size() != rows) {
    throw ShapeError("pick: " + std::to_string(columns.size()) + " indices for " +
                     std::to_string(rows) + " rows");
  }
  std::vector<std::size_t> index(columns.begin(), columns.end());
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    if (index[r] >= cols) {
      throw ArgumentError("pick: column " + std::to_string(index[r]) + " out of range " +
                          std::to_string(cols));
    }
    out[r] = a.values()[r * cols + index[r]];
  }
  return make_result({rows}, std::move(out), {a.node()},
                     [index = std::move(index), cols](Node& self) {
                       auto& g = self.inputs[0]->ensure_grad();
                       for (std::size_t r = 0; r < index.size(); ++r)
                         g[r * cols + index[r]] += self.grad[r];
                     },
                     "pick");
}

Tensor stop_gradient(const Tensor& a) {
  std::vector<double> out(a.values().begin(), a.values().end());
  return make_result(a.shape(), std::move(out), {}, {}, "stop_gradient");
}

Tensor gradient_reversal(const Tensor& a, double factor) {
  std::vector<double> out(a.values().begin(), a.values().end());
  return make_result(a.shape(), std::move(out), {a.node()},
                     [factor](Node& self) {
                       auto& g = self.inputs[0]->ensure_grad();
                       for (std::size_t i = 0; i < g.size(); ++i) g[i] -= factor * self.grad[i];
                     },
                     "gradient_reversal");
}

Tensor adaptive_average_pool(const Tensor& a, std::size_t target_length) {
  require_rank(a, 2, "adaptive_average_pool");
  const std::size_t length = a.dim(0);
  const std::size_t cols = a.dim(1);
  if (target_length == 0 || target_length > length) {
    throw ArgumentError("adaptive_average_pool: target length " +
                        std::to_string(target_length) + " not in [1, " +
                        std::to_string(length) + "]");
  }
  std::vector<std::size_t> bounds(target_length + 1);
  for (std::size_t t = 0; t <= target_length; ++t) bounds[t] = t * length / target_length;
  const auto x = a.values();
  std::vector<double> out(target_length * cols, 0.0);
  for (std::size_t t = 0; t < target_length; ++t) {
    const double inv = 1.0 / static_cast<double>(bounds[t + 1] - bounds[t]);
    for (std::size_t s = bounds[t]; s < bounds[t + 1]; ++s)
      for (std::size_t c = 0; c < cols; ++c) out[t * cols + c] += x[s * cols + c];
    for (std::size_t c = 0; c < cols; ++c) out[t * cols + c] *= inv;
  }
  return make_result({target_length, cols}, std::move(out), {a.node()},
                     [bounds = std::move(bounds), cols](Node& self) {
                       auto& g = self.inputs[0]->ensure_grad();
                       for (std::size_t t = 0; t + 1 < bounds.size(); ++t) {
                         const double inv = 1.0 / static_cast<double>(bounds[t + 1] - bounds[t]);
                         for (std::size_t s = bounds[t]; s < bounds[t + 1]; ++s)
                           for (std::size_t c = 0; c < cols; ++c)
                             g[s * cols + c] += self.grad[t * cols + c] * inv;
                       }
                     },
                     "adaptive_average_pool");
}

Tensor dilated_conv1d(const Tensor& input, const Tensor& kernel, const Tensor& bias,
                      std::size_t dilation) {
  require_rank(input, 2, "dilated_conv1d input");
  require_rank(kernel, 3, "dilated_conv1d kernel");
  require_rank(bias, 1, "dilated_conv1d bias");
  if (dilation == 0) throw ArgumentError("dilated_conv1d: dilation must be positive");
  const std::size_t length = input.dim(0);
  const std::size_t c_in = input.dim(1);
  const std::size_t taps = kernel.dim(0);
  const std::size_t c_out = kernel.dim(2);
  if (taps % 2 == 0) throw ArgumentError("dilated_conv1d: kernel size must be odd");
  if (kernel.dim(1) != c_in) {
    throw ShapeError("dilated_conv1d: kernel " + shape_string(kernel.shape()) +
                     " does not accept " + std::to_string(c_in) + " input channels");
  }
  if (bias.dim(0) != c_out) {
    throw ShapeError("dilated_conv1d: bias " + shape_string(bias.shape()) + " for " +
                     std::to_string(c_out) + " output channels");
  }
  const auto half = static_cast<std::ptrdiff_t>(taps / 2);
  const auto len = static_cast<std::ptrdiff_t>(length);
  const auto dil = static_cast<std::ptrdiff_t>(dilation);
  const auto x = input.values();
  const auto w = kernel.values();
  const auto b = bias.values();

  std::vector<double> out(length * c_out);
  for (std::size_t t = 0; t < length; ++t) std::copy(b.begin(), b.end(), out.begin() + t * c_out);
  for (std::ptrdiff_t t = 0; t < len; ++t) {
    double* orow = out.data() + t * static_cast<std::ptrdiff_t>(c_out);
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(taps); ++j) {
      const std::ptrdiff_t src = t + (j - half) * dil;
      if (src < 0 || src >= len) continue;
      const double* xrow = x.data() + src * static_cast<std::ptrdiff_t>(c_in);
      const double* wtap = w.data() + j * static_cast<std::ptrdiff_t>(c_in * c_out);
      for (std::size_t c = 0; c < c_in; ++c) {
        const double xv = xrow[c];
        const double* wrow = wtap + c * c_out;
        for (std::size_t o = 0; o < c_out; ++o) orow[o] += xv * wrow[o];
      }
    }
  }

  auto rule = [length, c_in, c_out, taps, half, dil](Node& self) {
    Node& in = *self.inputs[0];
    Node& ker = *self.inputs[1];
    Node& bi = *self.inputs[2];
    const auto len = static_cast<std::ptrdiff_t>(length);
    const double* g = self.grad.data();
    if (bi.requires_grad) {
      auto& gb = bi.ensure_grad();
      for (std::size_t t = 0; t < length; ++t)
        for (std::size_t o = 0; o < c_out; ++o) gb[o] += g[t * c_out + o];
    }
    double* gin = in.requires_grad ? in.ensure_grad().data() : nullptr;
    double* gker = ker.requires_grad ? ker.ensure_grad().data() : nullptr;
    if (!gin && !gker) return;
    for (std::ptrdiff_t t = 0; t < len; ++t) {
      const double* grow = g + t * static_cast<std::ptrdiff_t>(c_out);
      for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(taps); ++j) {
        const std::ptrdiff_t src = t + (j - half) * dil;
        if (src < 0 || src >= len) continue;
        const std::size_t tap_offset = static_cast<std::size_t>(j) * c_in * c_out;
        const double* xrow = in.value.data() + src * static_cast<std::ptrdiff_t>(c_in);
        for (std::size_t c = 0; c < c_in; ++c) {
          const double* wrow = ker.value.data() + tap_offset + c * c_out;
          if (gin) {
            double acc = 0.0;
            for (std::size_t o = 0; o < c_out; ++o) acc += grow[o] * wrow[o];
            gin[src * static_cast<std::ptrdiff_t>(c_in) + static_cast<std::ptrdiff_t>(c)] += acc;
          }
          if (gker) {
            const double xv = xrow[c];
            double* gw = gker + tap_offset + c * c_out;
            for (std::size_t o = 0; o < c_out; ++o) gw[o] += xv * grow[o];
          }
        }
      }
    }
  };
  return make_result({length, c_out}, std::move(out), {input.node(), kernel.node(), bias.node()},
                     std::move(rule), "dilated_conv1d");
}

}  // namespace viewseg::ad
