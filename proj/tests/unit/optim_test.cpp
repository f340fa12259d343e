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

#include <gtest/gtest.h>

#include <cmath>

#include "stylo/error.hpp"
#include "stylo/ops.hpp"
#include "stylo/optim.hpp"

namespace stylo {
namespace {

TEST(AdamUpdate, FirstStepMovesByLearningRate) {
  // After bias correction the first step is lr * g / (|g| + eps') = lr * sign(g).
  std::vector<double> theta{1.0, -1.0};
  const std::vector<double> g{0.3, -40.0};
  AdamMoments moments;
  adam_update(theta, g, moments, 1, 0.1);
  EXPECT_NEAR(theta[0], 0.9, 1e-7);
  EXPECT_NEAR(theta[1], -0.9, 1e-9);
}

TEST(AdamUpdate, MatchesHandRolledRecurrence) {
  std::vector<double> theta{0.5};
  AdamMoments moments;
  double m = 0, v = 0, ref = 0.5;
  const AdamConfig cfg;
  for (std::size_t t = 1; t <= 50; ++t) {
    const double g = std::sin(static_cast<double>(t)) + ref;
    adam_update(theta, std::vector<double>{g}, moments, t, 0.01);
    m = cfg.beta1 * m + (1 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1 - cfg.beta2) * g * g;
    const double mh = m / (1 - std::pow(cfg.beta1, t));
    const double vh = v / (1 - std::pow(cfg.beta2, t));
    ref -= 0.01 * mh / (std::sqrt(vh) + cfg.epsilon);
    ASSERT_NEAR(theta[0], ref, 1e-13) << "step " << t;
  }
}

TEST(Adam, ConvergesOnQuadratic) {
  auto theta = Tensor::scalar(0.0, true);
  Adam adam({theta});
  for (int i = 0; i < 5000; ++i) {
    adam.zero_grad();
    const auto d = ops::add(theta, Tensor::scalar(-3.0));
    backward(ops::scale(ops::mul(d, d), 0.5));
    adam.step(0.01);
  }
  EXPECT_LT(std::abs(theta.item() - 3.0), 1e-3);
  EXPECT_EQ(adam.steps(), 5000u);
}

TEST(Adam, RejectsNonFiniteGradientWithoutUpdating) {
  auto a = Tensor::scalar(1.0, true);
  auto b = Tensor::scalar(2.0, true);
  Adam adam({a, b});
  a.mutable_grad()[0] = 1.0;
  b.mutable_grad()[0] = NAN;
  EXPECT_THROW(adam.step(0.1), NumericError);
  EXPECT_EQ(a.item(), 1.0);
  EXPECT_EQ(adam.steps(), 0u);
}

TEST(Plateau, HalvesAfterExactlyPatienceStalls) {
  PlateauScheduler s({}, 1.0);
  EXPECT_EQ(s.step(1.0), 1.0);
  for (int i = 1; i <= 4; ++i) {
    EXPECT_EQ(s.step(1.0), 1.0) << "stall " << i;
    EXPECT_EQ(s.stalled_epochs(), static_cast<std::size_t>(i));
  }
  EXPECT_EQ(s.step(1.5), 0.5);
  // Counter restarts after a reduction.
  for (int i = 1; i <= 4; ++i) EXPECT_EQ(s.step(2.0), 0.5);
  EXPECT_EQ(s.step(2.0), 0.25);
}

TEST(Plateau, ImprovementResetsAndThresholdApplies) {
  PlateauScheduler s({}, 1.0);
  s.step(1.0);
  for (int i = 0; i < 4; ++i) s.step(1.0);
  EXPECT_EQ(s.step(0.9), 1.0);
  EXPECT_EQ(s.stalled_epochs(), 0u);
  // Within the threshold is not an improvement.
  for (int i = 0; i < 4; ++i) s.step(0.9 - 1e-10);
  EXPECT_EQ(s.step(0.9 - 2e-10), 0.5);
}

TEST(Plateau, RespectsMinLr) {
  PlateauConfig cfg;
  cfg.patience = 1;
  cfg.min_lr = 0.3;
  PlateauScheduler s(cfg, 1.0);
  s.step(1.0);
  EXPECT_EQ(s.step(1.0), 0.5);
  EXPECT_EQ(s.step(1.0), 0.3);
  EXPECT_EQ(s.step(1.0), 0.3);
}

TEST(Plateau, FunctionalFormAgreesWithScheduler) {
  const std::vector<double> history{3, 2, 2.5, 2, 2, 2.1, 2.2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  PlateauScheduler s({}, 1e-3);
  double lr = 1e-3;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const double expected = s.step(history[i]);
    lr = reduce_lr_on_plateau(std::span(history).first(i + 1), {}, lr);
    EXPECT_EQ(lr, expected) << "epoch " << i;
  }
}

}  // namespace
}  // namespace stylo
