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

#include "stylo/model.hpp"

#include <cmath>
#include <string>

#include "stylo/error.hpp"
#include "stylo/ops.hpp"

namespace stylo {
namespace {

constexpr std::size_t kPadRow = 0;

std::string to_str(std::size_t v) { return std::to_string(v); }

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError("invalid model config: " + message);
}

// Weight names in LstmWeights member order.
struct LstmSlot {
  const char* name;
  Tensor LstmWeights::*member;
  bool input_side;  // w_x*
  bool is_bias;
};

constexpr LstmSlot kLstmSlots[] = {
    {"w_xf", &LstmWeights::w_xf, true, false}, {"w_hf", &LstmWeights::w_hf, false, false},
    {"b_f", &LstmWeights::b_f, false, true},   {"w_xi", &LstmWeights::w_xi, true, false},
    {"w_hi", &LstmWeights::w_hi, false, false}, {"b_i", &LstmWeights::b_i, false, true},
    {"w_xo", &LstmWeights::w_xo, true, false}, {"w_ho", &LstmWeights::w_ho, false, false},
    {"b_o", &LstmWeights::b_o, false, true},   {"w_xc", &LstmWeights::w_xc, true, false},
    {"w_hc", &LstmWeights::w_hc, false, false}, {"b_c", &LstmWeights::b_c, false, true},
};

struct Projections {
  Tensor f, i, o, c;  // x W_x* for all time steps, [l x h] each
};

LstmState step(const LstmWeights& w, const Tensor& xf, const Tensor& xi,
               const Tensor& xo, const Tensor& xc, const LstmState& prev) {
  auto gate = [&prev](const Tensor& x_part, const Tensor& w_h, const Tensor& b) {
    const Tensor terms[] = {x_part, ops::matmul(prev.h, w_h), b};
    return ops::add_n(terms);
  };
  const Tensor f = ops::sigmoid(gate(xf, w.w_hf, w.b_f));
  const Tensor i = ops::sigmoid(gate(xi, w.w_hi, w.b_i));
  const Tensor o = ops::sigmoid(gate(xo, w.w_ho, w.b_o));
  const Tensor candidate = ops::tanh(gate(xc, w.w_hc, w.b_c));
  const Tensor c = ops::add(ops::mul(f, prev.c), ops::mul(i, candidate));
  const Tensor h = ops::mul(o, ops::tanh(c));
  return {h, c};
}

// Hidden states of one direction in time order.
std::vector<Tensor> run_direction(const LstmWeights& w, const Tensor& embedded,
                                  bool reverse) {
  const std::size_t l = embedded.rows();
  const std::size_t hidden = w.w_hf.rows();
  const Projections x{ops::matmul(embedded, w.w_xf), ops::matmul(embedded, w.w_xi),
                      ops::matmul(embedded, w.w_xo), ops::matmul(embedded, w.w_xc)};
  LstmState state{Tensor::zeros({1, hidden}), Tensor::zeros({1, hidden})};
  std::vector<Tensor> hs(l);
  for (std::size_t n = 0; n < l; ++n) {
    const std::size_t t = reverse ? l - 1 - n : n;
    state = step(w, ops::row(x.f, t), ops::row(x.i, t), ops::row(x.o, t),
                 ops::row(x.c, t), state);
    hs[t] = state.h;
  }
  return hs;
}

Tensor uniform_tensor(Shape shape, double limit, Rng& rng) {
  std::vector<double> v(shape_size(shape));
  for (double& e : v) e = rng.uniform(-limit, limit);
  return Tensor::from(std::move(shape), std::move(v), true);
}

}  // namespace

void ModelConfig::validate() const {
  require(vocab_size >= 2, "vocab_size must be at least 2 (padding + unknown)");
  require(embed_dim >= 1, "embed_dim must be >= 1");
  require(hidden_units >= 1, "hidden_units must be >= 1");
  require(conv_filters >= 1, "conv_filters must be >= 1");
  require(filter_rows >= 1 && filter_cols >= 1, "filter extents must be >= 1");
  require(pool_rows >= 1 && pool_cols >= 1, "pool extents must be >= 1");
  require(max_seq_len >= 1, "max_seq_len must be >= 1");
  require(n_authors >= 1, "n_authors must be >= 1");
  require(filter_rows <= max_seq_len, "filter_rows (k=" + to_str(filter_rows) +
                                          ") exceeds max_seq_len (" + to_str(max_seq_len) + ")");
  require(filter_cols <= hidden_units, "filter_cols (d=" + to_str(filter_cols) +
                                           ") exceeds hidden_units (" +
                                           to_str(hidden_units) + ")");
  require(pool_rows <= conv_rows(), "pool_rows exceeds convolution output rows (" +
                                        to_str(conv_rows()) + ")");
  require(pool_cols <= conv_cols(), "pool_cols exceeds convolution output columns (" +
                                        to_str(conv_cols()) + ")");
  for (double rate : {embed_dropout, blstm_dropout, penultimate_dropout}) {
    require(rate >= 0.0 && rate < 1.0, "dropout rates must lie in [0, 1)");
  }
  require(noise_sigma >= 0.0, "noise_sigma must be >= 0");
  require(noise_anneal_gamma >= 0.0, "noise_anneal_gamma must be >= 0");
}

std::vector<NamedTensor> ModelParams::named() const {
  std::vector<NamedTensor> out;
  out.push_back({"embedding", embedding, true});
  for (const auto& [prefix, dir] : {std::pair{"lstm.fwd.", &forward_lstm},
                                    std::pair{"lstm.bwd.", &backward_lstm}}) {
    for (const auto& slot : kLstmSlots) {
      out.push_back({prefix + std::string(slot.name), dir->*slot.member, !slot.is_bias});
    }
  }
  out.push_back({"combine.w", w_combine, true});
  out.push_back({"combine.b", b_combine, false});
  for (std::size_t f = 0; f < filters.size(); ++f) {
    out.push_back({"conv." + to_str(f) + ".filter", filters[f], true});
    out.push_back({"conv." + to_str(f) + ".bias", filter_bias[f], false});
  }
  out.push_back({"classifier.w", w_classifier, true});
  out.push_back({"classifier.b", b_classifier, false});
  return out;
}

std::vector<std::pair<std::string, Shape>> ModelParams::expected_shapes(
    const ModelConfig& c) {
  const std::size_t h = c.hidden_units;
  std::vector<std::pair<std::string, Shape>> out;
  out.emplace_back("embedding", Shape{c.vocab_size, c.embed_dim});
  for (const char* prefix : {"lstm.fwd.", "lstm.bwd."}) {
    for (const auto& slot : kLstmSlots) {
      Shape s = slot.is_bias ? Shape{1, h}
                             : Shape{slot.input_side ? c.embed_dim : h, h};
      out.emplace_back(prefix + std::string(slot.name), s);
    }
  }
  out.emplace_back("combine.w", Shape{c.combine == Combine::kSum ? h : 2 * h, h});
  out.emplace_back("combine.b", Shape{1, h});
  for (std::size_t f = 0; f < c.conv_filters; ++f) {
    out.emplace_back("conv." + to_str(f) + ".filter", Shape{c.filter_rows, c.filter_cols});
    out.emplace_back("conv." + to_str(f) + ".bias", Shape{1});
  }
  out.emplace_back("classifier.w", Shape{c.feature_length(), c.n_authors});
  out.emplace_back("classifier.b", Shape{1, c.n_authors});
  return out;
}

void ModelParams::audit(const ModelConfig& config) const {
  const auto expected = expected_shapes(config);
  const auto actual = named();
  if (filters.size() != filter_bias.size() || actual.size() != expected.size()) {
    throw ShapeError("parameter count " + to_str(actual.size()) + " does not match the " +
                     to_str(expected.size()) + " tensors implied by the config");
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (!actual[i].tensor.defined()) {
      throw ShapeError("parameter '" + expected[i].first + "' is missing");
    }
    if (actual[i].tensor.shape() != expected[i].second) {
      throw ShapeError("parameter '" + expected[i].first + "' has shape " +
                       shape_string(actual[i].tensor.shape()) + ", config implies " +
                       shape_string(expected[i].second));
    }
  }
}

ModelParams ModelParams::clone() const {
  ModelParams copy = *this;
  auto fresh = [](Tensor& t) {
    Tensor d = t.detach();
    d.set_requires_grad(t.requires_grad());
    t = d;
  };
  fresh(copy.embedding);
  for (auto* dir : {&copy.forward_lstm, &copy.backward_lstm}) {
    for (const auto& slot : kLstmSlots) fresh(dir->*slot.member);
  }
  fresh(copy.w_combine);
  fresh(copy.b_combine);
  for (auto& t : copy.filters) fresh(t);
  for (auto& t : copy.filter_bias) fresh(t);
  fresh(copy.w_classifier);
  fresh(copy.b_classifier);
  return copy;
}

ModelParams init_params(const ModelConfig& config, Rng& rng) {
  config.validate();
  const double filter_area = static_cast<double>(config.filter_rows * config.filter_cols);

  auto glorot = [&rng](Shape shape, double fan_in, double fan_out) {
    return uniform_tensor(std::move(shape), std::sqrt(6.0 / (fan_in + fan_out)), rng);
  };
  auto zeros = [](Shape shape) { return Tensor::zeros(std::move(shape), true); };
  const auto d = static_cast<double>(config.embed_dim);
  const auto h = static_cast<double>(config.hidden_units);
  const std::size_t hu = config.hidden_units;

  ModelParams p;
  p.embedding = glorot({config.vocab_size, config.embed_dim},
                       static_cast<double>(config.vocab_size), d);
  auto pad = p.embedding.mutable_values();
  std::fill_n(pad.begin(), config.embed_dim, 0.0);

  for (auto* dir : {&p.forward_lstm, &p.backward_lstm}) {
    for (const auto& slot : kLstmSlots) {
      if (slot.is_bias) {
        dir->*slot.member = zeros({1, hu});
      } else if (slot.input_side) {
        dir->*slot.member = glorot({config.embed_dim, hu}, d, h);
      } else {
        dir->*slot.member = glorot({hu, hu}, h, h);
      }
    }
  }
  const std::size_t combine_rows = config.combine == Combine::kSum ? hu : 2 * hu;
  p.w_combine = glorot({combine_rows, hu}, static_cast<double>(combine_rows), h);
  p.b_combine = zeros({1, hu});
  for (std::size_t f = 0; f < config.conv_filters; ++f) {
    p.filters.push_back(glorot({config.filter_rows, config.filter_cols}, filter_area,
                               filter_area * static_cast<double>(config.conv_filters)));
    p.filter_bias.push_back(zeros({1}));
  }
  p.w_classifier = glorot({config.feature_length(), config.n_authors},
                          static_cast<double>(config.feature_length()),
                          static_cast<double>(config.n_authors));
  p.b_classifier = zeros({1, config.n_authors});
  return p;
}

Tensor embed_sequence(const ModelParams& params, std::span<const std::int32_t> ids,
                      std::size_t length) {
  return ops::gather_rows(params.embedding, ids, length, kPadRow);
}

LstmState lstm_cell_step(const LstmWeights& w, const Tensor& x_t, const LstmState& prev) {
  return step(w, ops::matmul(x_t, w.w_xf), ops::matmul(x_t, w.w_xi),
              ops::matmul(x_t, w.w_xo), ops::matmul(x_t, w.w_xc), prev);
}

Tensor blstm_forward(const ModelParams& params, const Tensor& embedded, Combine combine) {
  if (embedded.rank() != 2 || embedded.rows() == 0) {
    throw ShapeError("blstm_forward needs a non-empty [l x D] input, got " +
                     shape_string(embedded.shape()));
  }
  const std::size_t l = embedded.rows();
  const auto fwd = run_direction(params.forward_lstm, embedded, false);
  const auto bwd = run_direction(params.backward_lstm, embedded, true);

  std::vector<Tensor> merged(l);
  for (std::size_t t = 0; t < l; ++t) {
    if (combine == Combine::kSum) {
      merged[t] = ops::add(fwd[t], bwd[t]);
    } else {
      const Tensor parts[] = {fwd[t], bwd[t]};
      merged[t] = ops::concat(parts);
    }
  }
  // Row-broadcast bias as ones[l x 1] . b[1 x h].
  const Tensor ones = Tensor::filled({l, 1}, 1.0);
  return ops::add(ops::matmul(ops::stack_rows(merged), params.w_combine),
                  ops::matmul(ones, params.b_combine));
}

std::vector<Tensor> feature_map(const ModelParams& params, const Tensor& H) {
  std::vector<Tensor> maps;
  maps.reserve(params.filters.size());
  for (std::size_t f = 0; f < params.filters.size(); ++f) {
    maps.push_back(ops::conv2d_valid(H, params.filters[f], params.filter_bias[f],
                                     ops::Activation::kTanh));
  }
  return maps;
}

Tensor pool_features(std::span<const Tensor> maps, std::size_t pool_rows,
                     std::size_t pool_cols) {
  std::vector<Tensor> pooled;
  pooled.reserve(maps.size());
  for (const auto& m : maps) pooled.push_back(ops::maxpool2d(m, pool_rows, pool_cols));
  return ops::concat(pooled);
}

Tensor apply_dropout(const Tensor& x, double rate, Rng& rng, bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("dropout rate must lie in [0, 1)");
  if (!training || rate == 0.0) return x;
  const double keep = 1.0 - rate;
  std::vector<double> mask(x.size());
  for (double& m : mask) m = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
  return ops::mul(x, Tensor::from(x.shape(), std::move(mask)));
}

Tensor apply_gaussian_noise(const Tensor& x, double sigma, Rng& rng, bool training) {
  if (!(sigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
  if (!training || sigma == 0.0) return x;
  std::vector<double> noise(x.size());
  for (double& e : noise) e = sigma * rng.normal();
  return ops::add(x, Tensor::from(x.shape(), std::move(noise)));
}

double noise_sigma_for_epoch(const ModelConfig& config, std::size_t epoch) {
  if (config.noise_anneal_gamma == 0.0) return config.noise_sigma;
  return config.noise_sigma /
         std::pow(1.0 + static_cast<double>(epoch), config.noise_anneal_gamma);
}

Tensor classify(const ModelParams& params, const ModelConfig& config,
                const Tensor& h_star, bool training, Rng& rng, double sigma) {
  Tensor x = apply_dropout(h_star, config.penultimate_dropout, rng, training);
  x = apply_gaussian_noise(x, sigma, rng, training);
  return ops::softmax(
      ops::add(ops::matmul(x, params.w_classifier), params.b_classifier));
}

Tensor forward_full(const ModelParams& params, const ModelConfig& config,
                    std::span<const std::int32_t> ids, bool training, Rng& rng,
                    std::size_t epoch) {
  Tensor x = embed_sequence(params, ids, config.max_seq_len);
  x = apply_dropout(x, config.embed_dropout, rng, training);
  Tensor H = blstm_forward(params, x, config.combine);
  H = apply_dropout(H, config.blstm_dropout, rng, training);
  const auto maps = feature_map(params, H);
  const Tensor h_star = pool_features(maps, config.pool_rows, config.pool_cols);
  return classify(params, config, h_star, training, rng,
                  noise_sigma_for_epoch(config, epoch));
}

std::vector<double> predict_proba(const ModelParams& params, const ModelConfig& config,
                                  std::span<const std::int32_t> ids) {
  NoGradGuard no_grad;
  Rng unused(0);
  const Tensor probs = forward_full(params, config, ids, false, unused, 0);
  return {probs.values().begin(), probs.values().end()};
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

ForwardShapes predict_shapes(const ModelConfig& c) {
  ForwardShapes s;
  s.embedded = {c.max_seq_len, c.embed_dim};
  s.blstm = {c.max_seq_len, c.hidden_units};
  s.conv = {c.conv_rows(), c.conv_cols()};
  s.pooled = {c.pooled_rows(), c.pooled_cols()};
  s.feature_length = c.feature_length();
  s.probs = {1, c.n_authors};
  return s;
}

}  // namespace stylo
