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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stylo/rng.hpp"
#include "stylo/tensor.hpp"

namespace stylo {

// How the forward and backward LSTM outputs are merged before the output
// projection: elementwise sum (width h) or concatenation (width 2h).
enum class Combine { kSum, kConcat };

struct ModelConfig {
  std::size_t vocab_size = 0;   // N, rows of the embedding table
  std::size_t embed_dim = 64;   // D
  std::size_t hidden_units = 64;  // h, also the width of the BLSTM output
  std::size_t conv_filters = 128;  // F
  std::size_t filter_rows = 3;  // k, window of subwords
  std::size_t filter_cols = 3;  // d, window of feature columns
  std::size_t pool_rows = 2;    // p1
  std::size_t pool_cols = 2;    // p2
  std::size_t max_seq_len = 64;  // l
  std::size_t n_authors = 0;    // m
  double embed_dropout = 0.5;
  double blstm_dropout = 0.3;
  double penultimate_dropout = 0.2;
  double noise_sigma = 0.2;
  double noise_anneal_gamma = 0.0;
  Combine combine = Combine::kSum;

  // Throws ConfigError naming the first violated constraint.
  void validate() const;

  std::size_t conv_rows() const { return max_seq_len - filter_rows + 1; }
  std::size_t conv_cols() const { return hidden_units - filter_cols + 1; }
  std::size_t pooled_rows() const { return conv_rows() / pool_rows; }
  std::size_t pooled_cols() const { return conv_cols() / pool_cols; }
  // |h*|
  std::size_t feature_length() const {
    return conv_filters * pooled_rows() * pooled_cols();
  }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Weights of one LSTM direction. Inputs are row vectors, so x . W_x* maps
// [1 x D] to [1 x h] and h . W_h* maps [1 x h] to [1 x h].
struct LstmWeights {
  Tensor w_xf, w_hf, b_f;  // forget gate
  Tensor w_xi, w_hi, b_i;  // input gate
  Tensor w_xo, w_ho, b_o;  // output gate
  Tensor w_xc, w_hc, b_c;  // candidate memory
};

struct NamedTensor {
  std::string name;
  Tensor tensor;
  bool is_weight;  // biases and similar offsets are not L2-penalized
};

struct ModelParams {
  Tensor embedding;  // [N x D]; row 0 (padding) stays zero
  LstmWeights forward_lstm;
  LstmWeights backward_lstm;
  Tensor w_combine;  // [h x h] (sum) or [2h x h] (concat)
  Tensor b_combine;  // [1 x h]
  std::vector<Tensor> filters;      // F x [k x d]
  std::vector<Tensor> filter_bias;  // F x [1]
  Tensor w_classifier;  // [|h*| x m]
  Tensor b_classifier;  // [1 x m]

  // Every parameter in a fixed order. Names are stable and used as
  // checkpoint keys.
  std::vector<NamedTensor> named() const;

  // Expected shape of every named tensor under `config`.
  static std::vector<std::pair<std::string, Shape>> expected_shapes(
      const ModelConfig& config);

  // Throws ShapeError naming the first tensor whose shape disagrees.
  void audit(const ModelConfig& config) const;

  // Deep copy with fresh storage.
  ModelParams clone() const;
};

struct LstmState {
  Tensor h;  // [1 x h]
  Tensor c;  // [1 x h]
};

// Glorot-uniform weights, zero biases, zero padding row. Deterministic in rng.
ModelParams init_params(const ModelConfig& config, Rng& rng);

// Looks up one embedding row per id, truncating to `length` or padding with
// the zero padding row.
Tensor embed_sequence(const ModelParams& params, std::span<const std::int32_t> ids,
                      std::size_t length);

// One LSTM step:
//   f = sigmoid(x W_xf + h W_hf + b_f), i and o likewise
//   c~ = tanh(x W_xc + h W_hc + b_c)
//   c = f * c_prev + i * c~
//   h = o * tanh(c)
LstmState lstm_cell_step(const LstmWeights& weights, const Tensor& x_t,
                         const LstmState& prev);

// Runs the forward direction over rows 0..l-1 and the backward direction
// over l-1..0, both from zero state, merges the two hidden states per time
// step and projects: H[t] = merge(hf_t, hb_t) W_combine + b_combine.
Tensor blstm_forward(const ModelParams& params, const Tensor& embedded,
                     Combine combine = Combine::kSum);

// O_f = tanh(conv2d_valid(H, filter_f, bias_f)) for every filter.
std::vector<Tensor> feature_map(const ModelParams& params, const Tensor& H);

// Max-pools every map and concatenates the flattened results in filter order.
Tensor pool_features(std::span<const Tensor> maps, std::size_t pool_rows,
                     std::size_t pool_cols);

// Inverted dropout while training, identity otherwise. rate in [0, 1).
Tensor apply_dropout(const Tensor& x, double rate, Rng& rng, bool training);

// Adds N(0, sigma^2) noise per element while training.
Tensor apply_gaussian_noise(const Tensor& x, double sigma, Rng& rng, bool training);

// sigma0 / (1 + epoch)^gamma; epoch counts from 0.
double noise_sigma_for_epoch(const ModelConfig& config, std::size_t epoch);

// softmax(h* W + b) over authors, with penultimate dropout and noise applied
// to h* while training.
Tensor classify(const ModelParams& params, const ModelConfig& config,
                const Tensor& h_star, bool training, Rng& rng, double sigma);

// Full per-document path: embed, dropout, BLSTM, dropout, convolution,
// pooling, classifier. Returns author probabilities [1 x m].
Tensor forward_full(const ModelParams& params, const ModelConfig& config,
                    std::span<const std::int32_t> ids, bool training, Rng& rng,
                    std::size_t epoch);

// Inference-mode probabilities; no randomness is consumed.
std::vector<double> predict_proba(const ModelParams& params, const ModelConfig& config,
                                  std::span<const std::int32_t> ids);

// Index of the largest value, lowest index on ties.
std::size_t argmax(std::span<const double> values);

// Closed-form intermediate shapes of forward_full.
struct ForwardShapes {
  Shape embedded;
  Shape blstm;
  Shape conv;
  Shape pooled;
  std::size_t feature_length = 0;
  Shape probs;
};
ForwardShapes predict_shapes(const ModelConfig& config);

}  // namespace stylo
