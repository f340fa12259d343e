// Copyright 2026 The Stylo Authors
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

#include "stylo/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "stylo/error.hpp"

namespace stylo {

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> values;
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<Tensor> parents;
  Tensor::BackwardFn backward;

  // Releases long parent chains iteratively instead of recursing through
  // nested shared_ptr destructors.
  ~Node() {
    std::vector<Tensor> pending = std::move(parents);
    backward = nullptr;
    while (!pending.empty()) {
      Tensor t = std::move(pending.back());
      pending.pop_back();
      if (t.node_ && t.node_.use_count() == 1) {
        for (auto& p : t.node_->parents) pending.push_back(std::move(p));
        t.node_->parents.clear();
        t.node_->backward = nullptr;
      }
    }
  }
};

}  // namespace detail

namespace {
thread_local bool g_recording = true;
}  // namespace

NoGradGuard::NoGradGuard() : previous_(g_recording) { g_recording = false; }
NoGradGuard::~NoGradGuard() { g_recording = previous_; }

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return filled(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::filled(Shape shape, double value, bool requires_grad) {
  const std::size_t n = shape_size(shape);
  return from(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
  if (shape_size(shape) != values.size()) {
    throw ShapeError("shape " + shape_string(shape) + " does not hold " +
                     std::to_string(values.size()) + " values");
  }
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->values = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return from({1}, {value}, requires_grad);
}

detail::Node& Tensor::node() const {
  if (!node_) throw Error("use of an undefined tensor");
  return *node_;
}

const Shape& Tensor::shape() const { return node().shape; }
std::size_t Tensor::size() const { return node().values.size(); }

std::size_t Tensor::rows() const {
  if (rank() != 2) throw ShapeError("expected a matrix, got " + shape_string(shape()));
  return shape()[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) throw ShapeError("expected a matrix, got " + shape_string(shape()));
  return shape()[1];
}

std::span<const double> Tensor::values() const { return node().values; }
std::span<double> Tensor::mutable_values() { return node().values; }

double Tensor::item() const {
  if (size() != 1) {
    throw ShapeError("item() on a tensor of shape " + shape_string(shape()));
  }
  return node().values[0];
}

double Tensor::at(std::size_t r, std::size_t c) const {
  return node().values[r * cols() + c];
}

bool Tensor::requires_grad() const { return node().requires_grad; }
void Tensor::set_requires_grad(bool on) { node().requires_grad = on; }

std::span<const double> Tensor::grad() const { return node().grad; }

std::span<double> Tensor::mutable_grad() {
  auto& n = node();
  if (n.grad.empty()) n.grad.assign(n.values.size(), 0.0);
  return n.grad;
}

void Tensor::zero_grad() {
  auto& n = node();
  std::fill(n.grad.begin(), n.grad.end(), 0.0);
}

Tensor Tensor::detach() const { return from(shape(), node().values, false); }

Tensor Tensor::make_result(Shape shape, std::vector<double> values,
                           std::vector<Tensor> parents, BackwardFn backward) {
  Tensor out = from(std::move(shape), std::move(values), false);
  const bool tracked = g_recording && std::any_of(parents.begin(), parents.end(),
                                   [](const Tensor& p) { return p.requires_grad(); });
  if (tracked) {
    auto& n = out.node();
    n.requires_grad = true;
    n.parents = std::move(parents);
    n.backward = std::move(backward);
  }
  return out;
}

void backward(const Tensor& loss) {
  if (loss.size() != 1) {
    throw ShapeError("backward() needs a scalar loss, got shape " +
                     shape_string(loss.shape()));
  }
  if (!loss.requires_grad()) return;

  // Iterative post-order DFS; the reverse is a valid processing order.
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(loss.node_.get(), 0);
  visited.insert(loss.node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node* parent = node->parents[next++].node_.get();
      if (parent->requires_grad && visited.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  detail::Node& root = *loss.node_;
  if (root.grad.empty()) root.grad.assign(1, 0.0);
  root.grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* node = *it;
    if (!node->backward || node->grad.empty()) continue;
    node->backward(node->values, node->grad);
  }
}

}  // namespace stylo
