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

#include "viewseg/tensor.hpp"

#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "viewseg/errors.hpp"

namespace viewseg::ad {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (const auto d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

std::vector<double>& Node::ensure_grad() {
  if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
  return grad;
}

namespace {

NodePtr make_leaf(Shape shape, std::vector<double> values, bool requires_grad) {
  if (shape_numel(shape) != values.size()) {
    throw ShapeError("tensor shape " + shape_string(shape) + " does not match " +
                     std::to_string(values.size()) + " values");
  }
  for (const auto d : shape) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive");
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return node;
}

}  // namespace

Tensor Tensor::constant(Shape shape, std::vector<double> values) {
  return Tensor(make_leaf(std::move(shape), std::move(values), false));
}

Tensor Tensor::parameter(Shape shape, std::vector<double> values) {
  return Tensor(make_leaf(std::move(shape), std::move(values), true));
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  const auto n = shape_numel(shape);
  return Tensor(make_leaf(std::move(shape), std::vector<double>(n, 0.0), requires_grad));
}

Tensor Tensor::scalar(double value) { return constant({}, {value}); }

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= rank()) {
    throw ArgumentError("axis " + std::to_string(axis) + " out of range for shape " +
                        shape_string(shape()));
  }
  return node_->shape[axis];
}

double Tensor::item() const {
  if (numel() != 1) {
    throw ArgumentError("item() on tensor of shape " + shape_string(shape()));
  }
  return node_->value[0];
}

double Tensor::at(std::size_t row, std::size_t col) const {
  return node_->value[row * node_->shape.back() + col];
}

Tensor Tensor::detached_copy() const {
  return Tensor(make_leaf(node_->shape, node_->value, node_->requires_grad));
}

Tape Tape::record(const Tensor& root) {
  Tape tape;
  if (!root.defined() || !root.requires_grad()) return tape;
  // Iterative post-order DFS; children are emitted before their consumers.
  std::unordered_set<const Node*> visited;
  std::vector<std::pair<NodePtr, std::size_t>> stack;
  stack.emplace_back(root.node(), 0);
  visited.insert(root.node().get());
  while (!stack.empty()) {
    auto& [node, next_input] = stack.back();
    if (next_input < node->inputs.size()) {
      NodePtr child = node->inputs[next_input++];
      if (child->requires_grad && visited.insert(child.get()).second) {
        stack.emplace_back(std::move(child), 0);
      }
      continue;
    }
    tape.entries.push_back(node);
    stack.pop_back();
  }
  return tape;
}

bool Tape::is_topologically_ordered() const {
  std::unordered_map<const Node*, std::size_t> position;
  for (std::size_t k = 0; k < entries.size(); ++k) position[entries[k].get()] = k;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    for (const auto& input : entries[k]->inputs) {
      if (!input->requires_grad || input->is_leaf()) continue;
      const auto it = position.find(input.get());
      if (it == position.end() || it->second >= k) return false;
    }
  }
  return true;
}

void backward(const Tensor& root) {
  if (!root.defined() || root.numel() != 1) {
    throw ArgumentError("backward() requires a scalar root");
  }
  if (!root.requires_grad()) return;
  const Tape tape = Tape::record(root);
  for (const auto& node : tape.entries) {
    if (!node->is_leaf()) node->grad.assign(node->value.size(), 0.0);
  }
  root.node()->ensure_grad()[0] += 1.0;
  for (auto it = tape.entries.rbegin(); it != tape.entries.rend(); ++it) {
    Node& node = **it;
    if (!node.is_leaf()) node.backward(node);
  }
}

}  // namespace viewseg::ad
