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

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "stylo/bpe.hpp"
#include "stylo/model.hpp"
#include "stylo/ops.hpp"
#include "stylo/rng.hpp"

namespace {

using namespace stylo;

std::vector<LabeledDocument> random_corpus(std::size_t docs, std::size_t words) {
  Rng rng(1);
  std::vector<LabeledDocument> out;
  for (std::size_t d = 0; d < docs; ++d) {
    std::string text;
    for (std::size_t w = 0; w < words; ++w) {
      const std::size_t len = 2 + rng.below(8);
      for (std::size_t i = 0; i < len; ++i) text += static_cast<char>('a' + rng.below(20));
      text += ' ';
    }
    out.push_back({"a", std::move(text)});
  }
  return out;
}

void BM_TrainBpe(benchmark::State& state) {
  const auto docs = random_corpus(200, 100);
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_bpe(docs, static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_TrainBpe)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Encode(benchmark::State& state) {
  const auto docs = random_corpus(200, 100);
  const auto model = train_bpe(docs, 1000);
  std::size_t bytes = 0;
  for (auto _ : state) {
    for (const auto& d : docs) {
      benchmark::DoNotOptimize(model.encode(d.text));
      bytes += d.text.size();
    }
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(bytes));
}
BENCHMARK(BM_Encode)->Unit(benchmark::kMillisecond);

void BM_Conv2d(benchmark::State& state) {
  Rng rng(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> in(n * n), f(9);
  for (auto& v : in) v = rng.uniform(-1, 1);
  for (auto& v : f) v = rng.uniform(-1, 1);
  const auto input = Tensor::from({n, n}, in);
  const auto filter = Tensor::from({3, 3}, f);
  const auto bias = Tensor::from({1}, {0.1});
  for (auto _ : state) {
    benchmark::DoNotOptimize(ops::conv2d_valid(input, filter, bias, ops::Activation::kTanh));
  }
}
BENCHMARK(BM_Conv2d)->Arg(64)->Arg(128);

ModelConfig default_model() {
  ModelConfig c;
  c.vocab_size = 2000;
  c.n_authors = 10;
  return c;
}

void BM_ForwardInference(benchmark::State& state) {
  const auto config = default_model();
  Rng rng(3);
  const auto params = init_params(config, rng);
  std::vector<std::int32_t> ids(config.max_seq_len);
  for (auto& id : ids) id = static_cast<std::int32_t>(2 + rng.below(1998));
  for (auto _ : state) benchmark::DoNotOptimize(predict_proba(params, config, ids));
}
BENCHMARK(BM_ForwardInference)->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State& state) {
  const auto config = default_model();
  Rng rng(4);
  const auto params = init_params(config, rng);
  std::vector<std::int32_t> ids(config.max_seq_len);
  for (auto& id : ids) id = static_cast<std::int32_t>(2 + rng.below(1998));
  for (auto _ : state) {
    const auto probs = forward_full(params, config, ids, true, rng, 0);
    backward(ops::neg_log(probs, 3));
  }
}
BENCHMARK(BM_ForwardBackward)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
