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

namespace stylo {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First and second moment estimates for one parameter block.
struct AdamMoments {
  std::vector<double> m;
  std::vector<double> v;
};

// One bias-corrected Adam update at step t (t >= 1):
//   m = b1 m + (1 - b1) g,  v = b2 v + (1 - b2) g^2
//   theta -= lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
// Moments are zero-initialized on first use.
void adam_update(std::span<double> params, std::span<const double> grads,
                 AdamMoments& moments, std::size_t t, double learning_rate,
                 const AdamConfig& config = {});

// Adam over a fixed list of parameter tensors, reading their gradients.
class Adam {
 public:
  explicit Adam(std::vector<Tensor> params, AdamConfig config = {});

  // Throws NumericError before modifying anything if a gradient is not finite.
  void step(double learning_rate);
  void zero_grad();
  std::size_t steps() const noexcept { return t_; }

 private:
  std::vector<Tensor> params_;
  std::vector<AdamMoments> moments_;
  AdamConfig config_;
  std::size_t t_ = 0;
};

struct PlateauConfig {
  std::size_t patience = 5;
  double factor = 0.5;
  double min_lr = 0.0;
  // Minimum decrease that counts as an improvement.
  double threshold = 1e-8;
};

// Learning rate after observing the last entry of `history`. Replays the
// whole history: an epoch improves when its loss is below the best so far by
// more than the threshold; after `patience` consecutive non-improving epochs
// the rate is multiplied by `factor` (never below min_lr) and the count
// restarts. Returns current_lr reduced only if a reduction falls on the last
// entry.
double reduce_lr_on_plateau(std::span<const double> history, const PlateauConfig& config,
                            double current_lr);

// Incremental form of reduce_lr_on_plateau.
class PlateauScheduler {
 public:
  PlateauScheduler(PlateauConfig config, double initial_lr);

  // Records one validation loss and returns the learning rate to use next.
  double step(double val_loss);
  double learning_rate() const noexcept { return lr_; }
  std::size_t stalled_epochs() const noexcept { return stalled_; }

 private:
  PlateauConfig config_;
  double lr_;
  double best_;
  std::size_t stalled_ = 0;
};

}  // namespace stylo
