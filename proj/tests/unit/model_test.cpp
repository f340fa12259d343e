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
#include <set>

#include "stylo/error.hpp"
#include "stylo/grad_check.hpp"
#include "stylo/model.hpp"
#include "stylo/ops.hpp"
#include "stylo/rng.hpp"

namespace stylo {
namespace {

ModelConfig small_config() {
  ModelConfig c;
  c.vocab_size = 12;
  c.embed_dim = 4;
  c.hidden_units = 5;
  c.conv_filters = 3;
  c.max_seq_len = 8;
  c.n_authors = 3;
  return c;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

TEST(ModelConfig, DefaultsAndValidation) {
  ModelConfig c;
  EXPECT_EQ(c.embed_dim, 64u);
  EXPECT_EQ(c.hidden_units, 64u);
  EXPECT_EQ(c.conv_filters, 128u);
  EXPECT_EQ(c.filter_rows, 3u);
  EXPECT_EQ(c.pool_rows, 2u);
  EXPECT_DOUBLE_EQ(c.embed_dropout, 0.5);
  EXPECT_DOUBLE_EQ(c.blstm_dropout, 0.3);
  EXPECT_DOUBLE_EQ(c.penultimate_dropout, 0.2);
  EXPECT_DOUBLE_EQ(c.noise_sigma, 0.2);
  EXPECT_THROW(c.validate(), ConfigError);  // vocab and authors unset

  auto ok = small_config();
  EXPECT_NO_THROW(ok.validate());
  for (auto mutate : std::vector<std::function<void(ModelConfig&)>>{
           [](auto& m) { m.conv_filters = 0; },
           [](auto& m) { m.filter_rows = 9; },
           [](auto& m) { m.filter_cols = 6; },
           [](auto& m) { m.pool_rows = 7; },
           [](auto& m) { m.embed_dropout = 1.0; },
           [](auto& m) { m.noise_sigma = -0.1; },
           [](auto& m) { m.n_authors = 0; }}) {
    auto bad = small_config();
    mutate(bad);
    EXPECT_THROW(bad.validate(), ConfigError);
  }
}

TEST(ModelConfig, ShapeAlgebra) {
  const auto c = small_config();
  EXPECT_EQ(c.conv_rows(), 6u);
  EXPECT_EQ(c.conv_cols(), 3u);
  EXPECT_EQ(c.feature_length(), 3u * 1u * 3u);
  const auto s = predict_shapes(c);
  EXPECT_EQ(s.embedded, (Shape{8, 4}));
  EXPECT_EQ(s.blstm, (Shape{8, 5}));
  EXPECT_EQ(s.conv, (Shape{6, 3}));
  EXPECT_EQ(s.probs, (Shape{1, 3}));
}

TEST(InitParams, ShapesZerosAndGlorotBounds) {
  const auto c = small_config();
  Rng rng(1);
  const auto p = init_params(c, rng);
  EXPECT_NO_THROW(p.audit(c));
  const auto expected = ModelParams::expected_shapes(c);
  const auto named = p.named();
  ASSERT_EQ(named.size(), expected.size());
  std::set<std::string> names;
  for (std::size_t i = 0; i < named.size(); ++i) {
    EXPECT_EQ(named[i].name, expected[i].first);
    EXPECT_EQ(named[i].tensor.shape(), expected[i].second) << named[i].name;
    EXPECT_TRUE(named[i].tensor.requires_grad());
    names.insert(named[i].name);
    const auto& shape = named[i].tensor.shape();
    if (!named[i].is_weight) {
      for (double v : named[i].tensor.values()) EXPECT_EQ(v, 0.0) << named[i].name;
    } else if (shape.size() == 2) {
      const double limit = std::sqrt(6.0 / static_cast<double>(shape[0] + shape[1]));
      for (double v : named[i].tensor.values()) EXPECT_LE(std::abs(v), limit + 1e-12);
    }
  }
  EXPECT_EQ(names.size(), named.size());
  for (std::size_t j = 0; j < c.embed_dim; ++j) EXPECT_EQ(p.embedding.at(0, j), 0.0);

  Rng again(1);
  const auto q = init_params(c, again);
  EXPECT_EQ(std::vector<double>(p.w_classifier.values().begin(), p.w_classifier.values().end()),
            std::vector<double>(q.w_classifier.values().begin(), q.w_classifier.values().end()));
}

TEST(InitParams, AuditNamesMismatchedTensor) {
  const auto c = small_config();
  Rng rng(2);
  auto p = init_params(c, rng);
  p.b_combine = Tensor::zeros({1, 7});
  try {
    p.audit(c);
    FAIL();
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("combine.b"), std::string::npos);
  }
}

TEST(Embed, PadsAndTruncates) {
  const auto c = small_config();
  Rng rng(3);
  const auto p = init_params(c, rng);
  const std::vector<std::int32_t> ids{5, 2};
  const auto e = embed_sequence(p, ids, c.max_seq_len);
  EXPECT_EQ(e.shape(), (Shape{8, 4}));
  EXPECT_EQ(e.at(0, 1), p.embedding.at(5, 1));
  for (std::size_t r = 2; r < 8; ++r) EXPECT_EQ(e.at(r, 0), 0.0);
  const std::vector<std::int32_t> long_ids(20, 3);
  EXPECT_EQ(embed_sequence(p, long_ids, c.max_seq_len).rows(), 8u);
}

// One LSTM step recomputed here from the gate equations.
TEST(Lstm, CellMatchesEquations) {
  Rng rng(4);
  const std::size_t D = 3, H = 2;
  auto rnd = [&](Shape s) {
    std::vector<double> v(shape_size(s));
    for (auto& x : v) x = rng.uniform(-1, 1);
    return Tensor::from(s, v);
  };
  LstmWeights w{rnd({D, H}), rnd({H, H}), rnd({1, H}), rnd({D, H}), rnd({H, H}), rnd({1, H}),
                rnd({D, H}), rnd({H, H}), rnd({1, H}), rnd({D, H}), rnd({H, H}), rnd({1, H})};
  const auto x = rnd({1, D});
  const LstmState prev{rnd({1, H}), rnd({1, H})};
  const auto next = lstm_cell_step(w, x, prev);

  auto affine = [&](const Tensor& wx, const Tensor& wh, const Tensor& b, std::size_t j) {
    double s = b.values()[j];
    for (std::size_t i = 0; i < D; ++i) s += x.values()[i] * wx.at(i, j);
    for (std::size_t i = 0; i < H; ++i) s += prev.h.values()[i] * wh.at(i, j);
    return s;
  };
  for (std::size_t j = 0; j < H; ++j) {
    const double f = sigmoid(affine(w.w_xf, w.w_hf, w.b_f, j));
    const double in = sigmoid(affine(w.w_xi, w.w_hi, w.b_i, j));
    const double o = sigmoid(affine(w.w_xo, w.w_ho, w.b_o, j));
    const double cand = std::tanh(affine(w.w_xc, w.w_hc, w.b_c, j));
    const double cell = f * prev.c.values()[j] + in * cand;
    EXPECT_NEAR(next.c.values()[j], cell, 1e-14);
    EXPECT_NEAR(next.h.values()[j], o * std::tanh(cell), 1e-14);
  }
}

TEST(Blstm, DirectionsSeeOppositeContext) {
  auto c = small_config();
  Rng rng(5);
  const auto p = init_params(c, rng);
  // Changing only the last token must change the first output row through
  // the backward direction.
  const std::vector<std::int32_t> a{3, 4, 5, 6, 7, 8, 9, 10};
  auto b = a;
  b.back() = 11;
  const auto ha = blstm_forward(p, embed_sequence(p, a, 8));
  const auto hb = blstm_forward(p, embed_sequence(p, b, 8));
  EXPECT_NE(ha.at(0, 0), hb.at(0, 0));
  EXPECT_EQ(ha.shape(), (Shape{8, 5}));

  c.combine = Combine::kConcat;
  Rng rng2(5);
  const auto pc = init_params(c, rng2);
  EXPECT_EQ(pc.w_combine.shape(), (Shape{10, 5}));
  EXPECT_EQ(blstm_forward(pc, embed_sequence(pc, a, 8), Combine::kConcat).shape(),
            (Shape{8, 5}));
}

TEST(Dropout, IdentityAtInferenceAndInvertedScaling) {
  Rng rng(6);
  const auto x = Tensor::filled({1, 2000}, 2.0);
  const auto eval = apply_dropout(x, 0.5, rng, false);
  for (double v : eval.values()) EXPECT_EQ(v, 2.0);
  const auto y = apply_dropout(x, 0.25, rng, true);
  std::size_t zeros = 0;
  for (double v : y.values()) {
    if (v == 0.0) {
      ++zeros;
    } else {
      EXPECT_DOUBLE_EQ(v, 2.0 / 0.75);
    }
  }
  EXPECT_NEAR(static_cast<double>(zeros) / 2000.0, 0.25, 0.04);
  const auto untouched = apply_dropout(x, 0.0, rng, true);
  for (double v : untouched.values()) EXPECT_EQ(v, 2.0);
}

TEST(Noise, OnlyWhileTrainingAndAnnealed) {
  Rng rng(7);
  const auto x = Tensor::filled({1, 10}, 1.0);
  for (double v : apply_gaussian_noise(x, 0.2, rng, false).values()) EXPECT_EQ(v, 1.0);
  const auto noisy = apply_gaussian_noise(x, 0.2, rng, true);
  EXPECT_NE(noisy.values()[0], 1.0);

  auto c = small_config();
  EXPECT_DOUBLE_EQ(noise_sigma_for_epoch(c, 5), 0.2);
  c.noise_anneal_gamma = 0.55;
  EXPECT_DOUBLE_EQ(noise_sigma_for_epoch(c, 0), 0.2);
  EXPECT_NEAR(noise_sigma_for_epoch(c, 3), 0.2 / std::pow(4.0, 0.55), 1e-15);
}

TEST(Forward, ProbabilitiesAndDeterministicInference) {
  const auto c = small_config();
  Rng rng(8);
  const auto p = init_params(c, rng);
  const std::vector<std::int32_t> ids{2, 3, 4, 1, 9};
  const auto a = predict_proba(p, c, ids);
  const auto b = predict_proba(p, c, ids);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 3u);
  double total = 0;
  for (double v : a) {
    EXPECT_GT(v, 0.0);
    total += v;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);

  Rng r1(9), r2(9);
  const auto t1 = forward_full(p, c, ids, true, r1, 0);
  const auto t2 = forward_full(p, c, ids, true, r2, 0);
  EXPECT_EQ(std::vector<double>(t1.values().begin(), t1.values().end()),
            std::vector<double>(t2.values().begin(), t2.values().end()));
}

TEST(Forward, EmptyDocumentIsAllPadding) {
  const auto c = small_config();
  Rng rng(10);
  const auto p = init_params(c, rng);
  const auto probs = predict_proba(p, c, std::vector<std::int32_t>{});
  EXPECT_EQ(probs.size(), 3u);
}

TEST(Argmax, LowestIndexOnTies) {
  EXPECT_EQ(argmax(std::vector<double>{0.2, 0.5, 0.5}), 1u);
  EXPECT_EQ(argmax(std::vector<double>{0.9, 0.05, 0.05}), 0u);
}

TEST(Forward, GradientsMatchFiniteDifferences) {
  auto c = small_config();
  c.embed_dropout = c.blstm_dropout = c.penultimate_dropout = 0.0;
  c.noise_sigma = 0.0;
  Rng rng(11);
  auto params = init_params(c, rng);
  for (auto& nt : params.named()) {
    if (!nt.is_weight) {
      for (auto& v : nt.tensor.mutable_values()) v = rng.uniform(-0.2, 0.2);
    }
  }
  const std::vector<std::int32_t> ids{2, 7, 3, 11, 5};
  auto loss = [&]() {
    Rng r(1);
    return ops::neg_log(forward_full(params, c, ids, true, r, 0), 2);
  };
  std::vector<Tensor> tensors;
  for (const auto& nt : params.named()) tensors.push_back(nt.tensor);
  const auto r = grad_check(loss, tensors);
  EXPECT_LT(r.max_relative_error, 1e-4)
      << params.named()[r.param].name << "[" << r.element << "] analytic " << r.analytic
      << " numeric " << r.numeric;
}

TEST(Clone, DeepCopy) {
  const auto c = small_config();
  Rng rng(12);
  auto p = init_params(c, rng);
  auto q = p.clone();
  q.embedding.mutable_values()[5] += 1.0;
  EXPECT_NE(p.embedding.values()[5], q.embedding.values()[5]);
}

}  // namespace
}  // namespace stylo
