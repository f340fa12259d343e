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
#include <span>

#include "stylo/tensor.hpp"

namespace stylo {

struct GradCheckResult {
  double max_relative_error = 0.0;
  // Location of the worst element.
  std::size_t param = 0;
  std::size_t element = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

// Compares backward() against central differences for every element of
// every tensor in `params`. `loss` rebuilds the scalar from scratch on each
// call. Relative error is |a - n| / max(|a|, |n|, 1e-12).
// eps must lie in [1e-7, 1e-3]; non-finite values throw NumericError.
GradCheckResult grad_check(const std::function<Tensor()>& loss,
                           std::span<Tensor> params, double eps = 1e-6);

}  // namespace stylo
