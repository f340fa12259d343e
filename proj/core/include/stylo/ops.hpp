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
#include <span>
#include <vector>

#include "stylo/tensor.hpp"

// Differentiable operations. Row vectors are 1 x n matrices throughout.
namespace stylo::ops {

enum class Activation { kIdentity, kTanh, kSigmoid };

// [m x k] . [k x n] -> [m x n]. Throws ShapeError naming both shapes.
Tensor matmul(const Tensor& a, const Tensor& b);

// Elementwise; shapes must match exactly.
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor activate(const Tensor& a, Activation f);

// Sum of any number of same-shaped tensors.
Tensor add_n(std::span<const Tensor> terms);

// Softmax over every element, with max subtraction. Throws NumericError on
// non-finite input.
Tensor softmax(const Tensor& x);

// Narrow 2D convolution (cross-correlation, stride 1, no padding):
//   out[i, j] = f(sum_{a<k, b<d} filter[a, b] * input[i + a, j + b] + bias)
// input [l x w], filter [k x d], bias holds one value; out [(l-k+1) x (w-d+1)].
Tensor conv2d_valid(const Tensor& input, const Tensor& filter, const Tensor& bias,
                    Activation f);

// Non-overlapping max pooling with stride equal to the window; trailing rows
// and columns that do not fill a window are dropped. Output is
// [floor(a/p1) x floor(b/p2)]. Gradient goes to the first maximum of each
// window in row-major order.
Tensor maxpool2d(const Tensor& input, std::size_t p1, std::size_t p2);

// Row r of a matrix as [1 x cols].
Tensor row(const Tensor& m, std::size_t r);

// Stacks [1 x n] rows into [rows x n].
Tensor stack_rows(std::span<const Tensor> rows);

// Flattens every part and concatenates them into a [1 x total] row.
Tensor concat(std::span<const Tensor> parts);

// out[i, :] = table[ids[i], :] for i < length. Missing positions and ids
// equal to `pad_row` give zero rows: the pad row is never read, so it takes
// no part in the output or the gradient.
Tensor gather_rows(const Tensor& table, std::span<const std::int32_t> ids,
                   std::size_t length, std::size_t pad_row);

// Scalar sum of all elements.
Tensor sum(const Tensor& x);

// Scalar sum of squares, skipping the first `skip_rows` rows of a matrix.
Tensor sum_squares(const Tensor& x, std::size_t skip_rows = 0);

// Scalar -log(max(x[index], floor)); no gradient below the floor.
Tensor neg_log(const Tensor& probs, std::size_t index, double floor = 1e-12);

}  // namespace stylo::ops
