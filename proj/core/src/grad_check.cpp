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

#include "stylo/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "stylo/error.hpp"

namespace stylo {
namespace {

double evaluate(const std::function<Tensor()>& loss) {
  const double v = loss().item();
  if (!std::isfinite(v)) throw NumericError("grad_check: non-finite loss");
  return v;
}

}  // namespace

GradCheckResult grad_check(const std::function<Tensor()>& loss,
                           std::span<Tensor> params, double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-3)) {
    throw ConfigError("grad_check: eps must lie in [1e-7, 1e-3]");
  }
  for (auto& p : params) p.zero_grad();
  const Tensor out = loss();
  if (!std::isfinite(out.item())) throw NumericError("grad_check: non-finite loss");
  backward(out);

  GradCheckResult result;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor& p = params[pi];
    std::vector<double> analytic(p.size(), 0.0);
    if (!p.grad().empty()) std::copy(p.grad().begin(), p.grad().end(), analytic.begin());
    auto values = p.mutable_values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + eps;
      const double up = evaluate(loss);
      values[i] = saved - eps;
      const double down = evaluate(loss);
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      if (!std::isfinite(analytic[i])) throw NumericError("grad_check: non-finite gradient");
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-12});
      const double rel = std::abs(analytic[i] - numeric) / denom;
      if (rel > result.max_relative_error ||
          (pi == 0 && i == 0 && result.max_relative_error == 0.0)) {
        result = {rel, pi, i, analytic[i], numeric};
      }
    }
  }
  return result;
}

}  // namespace stylo
