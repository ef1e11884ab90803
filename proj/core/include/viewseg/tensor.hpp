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
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace viewseg::ad {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_string(const Shape& shape);

struct Node;
using NodePtr = std::shared_ptr<Node>;

// One value in the differentiation graph. Leaves have no backward rule;
// interior nodes are created by the primitives in ops.hpp and only record
// their inputs when at least one input requires a gradient.
struct Node {
  Shape shape;
  std::vector<double> value;
  // Empty until a backward pass reaches this node.
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<NodePtr> inputs;
  // Reads self.grad and accumulates into self.inputs[i]->grad.
  std::function<void(Node& self)> backward;
  const char* op = "leaf";

  bool is_leaf() const { return !backward; }
  // Sizes grad to match value (zero-filled) and returns it.
  std::vector<double>& ensure_grad();
};

// Reference handle to a Node. Copying a Tensor aliases the same storage, the
// way parameters are shared between a model and its optimizer; use
// detached_copy() for an independent value.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(NodePtr node) : node_(std::move(node)) {}

  static Tensor constant(Shape shape, std::vector<double> values);
  static Tensor parameter(Shape shape, std::vector<double> values);
  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor scalar(double value);

  bool defined() const { return static_cast<bool>(node_); }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const { return node_->value.size(); }

  std::span<const double> values() const { return node_->value; }
  // Direct write access; intended for leaves (parameter updates,
  // finite-difference perturbation).
  std::span<double> mutable_values() { return node_->value; }
  double item() const;
  double at(std::size_t i) const { return node_->value[i]; }
  double at(std::size_t row, std::size_t col) const;

  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return !node_->grad.empty(); }
  // Gradient storage; empty span when no backward pass has reached it.
  std::span<const double> grad() const { return node_->grad; }
  void zero_grad() { node_->grad.clear(); }

  Tensor detached_copy() const;

  const NodePtr& node() const { return node_; }

 private:
  NodePtr node_;
};

// Nodes reachable from a root, in topological order: every input of entry k
// is either a leaf or an entry with a smaller index.
struct Tape {
  std::vector<NodePtr> entries;

  static Tape record(const Tensor& root);
  bool is_topologically_ordered() const;
};

// Reverse sweep from a scalar root. Leaf gradients accumulate across calls;
// interior gradients are reset at the start of each sweep. Throws
// ArgumentError for a non-scalar root.
void backward(const Tensor& root);

}  // namespace viewseg::ad
