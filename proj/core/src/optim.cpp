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

#include "stylo/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stylo/error.hpp"

namespace stylo {

void adam_update(std::span<double> params, std::span<const double> grads,
                 AdamMoments& moments, std::size_t t, double learning_rate,
                 const AdamConfig& config) {
  if (t == 0) throw ConfigError("Adam step index starts at 1");
  if (grads.size() != params.size()) throw ShapeError("Adam: gradient size mismatch");
  if (moments.m.empty()) {
    moments.m.assign(params.size(), 0.0);
    moments.v.assign(params.size(), 0.0);
  }
  const double b1 = config.beta1;
  const double b2 = config.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(t));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    moments.m[i] = b1 * moments.m[i] + (1.0 - b1) * g;
    moments.v[i] = b2 * moments.v[i] + (1.0 - b2) * g * g;
    const double m_hat = moments.m[i] / correction1;
    const double v_hat = moments.v[i] / correction2;
    params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
  }
}

Adam::Adam(std::vector<Tensor> params, AdamConfig config)
    : params_(std::move(params)), moments_(params_.size()), config_(config) {
  if (!(config_.beta1 > 0.0 && config_.beta1 < 1.0 && config_.beta2 > 0.0 &&
        config_.beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in (0, 1)");
  }
}

void Adam::step(double learning_rate) {
  for (const auto& p : params_) {
    for (double g : p.grad()) {
      if (!std::isfinite(g)) throw NumericError("Adam: non-finite gradient");
    }
  }
  ++t_;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor& p = params_[i];
    if (p.grad().empty()) p.mutable_grad();
    adam_update(p.mutable_values(), p.grad(), moments_[i], t_, learning_rate, config_);
  }
}

void Adam::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

double reduce_lr_on_plateau(std::span<const double> history, const PlateauConfig& config,
                            double current_lr) {
  if (config.patience == 0) throw ConfigError("plateau patience must be >= 1");
  double best = std::numeric_limits<double>::infinity();
  std::size_t stalled = 0;
  bool reduce_now = false;
  for (double loss : history) {
    reduce_now = false;
    if (loss < best - config.threshold) {
      best = loss;
      stalled = 0;
    } else if (++stalled >= config.patience) {
      reduce_now = true;
      stalled = 0;
    }
  }
  return reduce_now ? std::max(current_lr * config.factor, config.min_lr) : current_lr;
}

PlateauScheduler::PlateauScheduler(PlateauConfig config, double initial_lr)
    : config_(config), lr_(initial_lr), best_(std::numeric_limits<double>::infinity()) {
  if (config_.patience == 0) throw ConfigError("plateau patience must be >= 1");
  if (!(config_.factor > 0.0 && config_.factor < 1.0)) {
    throw ConfigError("plateau factor must lie in (0, 1)");
  }
}

double PlateauScheduler::step(double val_loss) {
  if (val_loss < best_ - config_.threshold) {
    best_ = val_loss;
    stalled_ = 0;
  } else if (++stalled_ >= config_.patience) {
    lr_ = std::max(lr_ * config_.factor, config_.min_lr);
    stalled_ = 0;
  }
  return lr_;
}

}  // namespace stylo
