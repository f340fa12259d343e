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

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace stylo {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

namespace detail {
struct Node;
}

// Dense row-major float64 array with an optional gradient buffer. A Tensor is
// a shared handle: copies alias the same storage. Operations on tensors that
// require gradients record themselves on a per-result tape entry; backward()
// walks those entries in reverse topological order.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor filled(Shape shape, double value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const noexcept { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t size() const;
  std::size_t rank() const { return shape().size(); }
  // Extents of a rank-2 tensor.
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> values() const;
  std::span<double> mutable_values();
  double item() const;
  double at(std::size_t r, std::size_t c) const;

  bool requires_grad() const;
  void set_requires_grad(bool on);

  // Empty span until a gradient has been accumulated or mutable_grad() called.
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  void zero_grad();

  // Fresh leaf holding a copy of the values.
  Tensor detach() const;

  bool same_as(const Tensor& other) const noexcept { return node_ == other.node_; }

  // Internal: used by operations to build the tape.
  using BackwardFn = std::function<void(std::span<const double> out_values,
                                        std::span<const double> out_grad)>;
  static Tensor make_result(Shape shape, std::vector<double> values,
                            std::vector<Tensor> parents, BackwardFn backward);

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  detail::Node& node() const;

  friend void backward(const Tensor& loss);
  friend struct detail::Node;

  std::shared_ptr<detail::Node> node_;
};

// While alive, operations on this thread record no tape entries. Used for
// inference passes.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Accumulates d(loss)/d(t) into every tensor t on the tape that requires a
// gradient. `loss` must hold exactly one element. Gradients add to whatever
// is already stored, so several backward passes sum.
void backward(const Tensor& loss);

}  // namespace stylo
