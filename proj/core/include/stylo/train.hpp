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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stylo/bpe.hpp"
#include "stylo/corpus.hpp"
#include "stylo/model.hpp"
#include "stylo/optim.hpp"

namespace stylo {

struct TrainConfig {
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  AdamConfig adam;
  double l2_lambda = 1e-5;
  std::size_t epochs = 20;
  PlateauConfig plateau;
  std::uint64_t seed = 1;
  std::size_t kfold = kDefaultFolds;

  void validate() const;

  friend bool operator==(const TrainConfig& a, const TrainConfig& b) {
    return a.batch_size == b.batch_size && a.learning_rate == b.learning_rate &&
           a.adam.beta1 == b.adam.beta1 && a.adam.beta2 == b.adam.beta2 &&
           a.adam.epsilon == b.adam.epsilon && a.l2_lambda == b.l2_lambda &&
           a.epochs == b.epochs && a.plateau.patience == b.plateau.patience &&
           a.plateau.factor == b.plateau.factor && a.plateau.min_lr == b.plateau.min_lr &&
           a.plateau.threshold == b.plateau.threshold && a.seed == b.seed &&
           a.kfold == b.kfold;
  }
};

struct EpochRow {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  double learning_rate = 0.0;
};

struct TrainReport {
  std::vector<EpochRow> epochs;
  std::optional<double> test_accuracy;
  std::size_t optimizer_steps = 0;
  double wall_seconds = 0.0;
};

// Sorted author labels and their class indices.
class LabelMap {
 public:
  LabelMap() = default;
  explicit LabelMap(std::vector<std::string> authors);
  static LabelMap from_documents(std::span<const LabeledDocument> docs);

  // Throws CorpusError for labels outside the map.
  std::size_t index_of(const std::string& author) const;
  const std::string& author(std::size_t index) const { return authors_.at(index); }
  const std::vector<std::string>& authors() const noexcept { return authors_; }
  std::size_t size() const noexcept { return authors_.size(); }

  // Labels in `docs` that are not in the map, sorted and de-duplicated.
  std::vector<std::string> unknown(std::span<const LabeledDocument> docs) const;

 private:
  std::vector<std::string> authors_;
};

struct EncodedDocument {
  std::vector<TokenId> ids;
  std::size_t label = 0;
};

std::vector<EncodedDocument> encode_documents(std::span<const LabeledDocument> docs,
                                              const BpeModel& bpe, const LabelMap& labels);

// lambda * sum of squared weights. Biases and the padding embedding row are
// excluded.
Tensor l2_penalty(const ModelParams& params, double lambda);

// J = -(1/B) sum_i log(probs_i[target_i]) + lambda * ||W||^2, with the log
// argument clamped at 1e-12. Each probs entry is one sample's [1 x m] output.
Tensor cross_entropy_l2(std::span<const Tensor> probs, std::span<const std::size_t> targets,
                        const ModelParams& params, double lambda);

// Copy of `config` with vocab_size and n_authors taken from the tokenizer and
// label map.
ModelConfig resolve_model_config(ModelConfig config, const BpeModel& bpe,
                                 const LabelMap& labels);

struct TrainCallbacks {
  // Called after each epoch's row is final.
  std::function<void(const EpochRow&)> on_epoch;
};

struct TrainResult {
  ModelParams params;
  LabelMap labels;
  TrainReport report;
};

// Mini-batch training. Each epoch shuffles the training documents, and for
// every batch runs forward_full in training mode per document, backpropagates
// the batch-mean cross-entropy plus the L2 term, and takes one Adam step. A
// validation pass in inference mode then feeds the plateau scheduler. When
// the split has test documents their accuracy is recorded at the end.
// Deterministic in (configs, split, seed). Throws NumericError naming the
// epoch and batch on a non-finite loss.
TrainResult train(const ModelConfig& model_config, const TrainConfig& train_config,
                  const BpeModel& bpe, const DatasetSplit& split,
                  const TrainCallbacks& callbacks = {});

struct Evaluation {
  double accuracy = 0.0;
  double mean_loss = 0.0;
  std::vector<std::size_t> predictions;
  // confusion[true][predicted]
  std::vector<std::vector<std::size_t>> confusion;
};

Evaluation evaluate_encoded(const ModelParams& params, const ModelConfig& config,
                            std::span<const EncodedDocument> docs, std::size_t n_classes);

// Fraction of documents whose argmax prediction is their author. Throws
// CorpusError when a document's author is not in `labels`.
double evaluate_accuracy(const ModelParams& params, const ModelConfig& config,
                         const BpeModel& bpe, std::span<const LabeledDocument> docs,
                         const LabelMap& labels);

struct FoldResult {
  double accuracy = 0.0;
  TrainReport report;
};

struct KFoldResult {
  std::vector<FoldResult> folds;
  double mean_accuracy = 0.0;
};

// Trains one fresh model per stratified fold. Fold i fits its tokenizer on
// its own training documents, trains with seed + i, uses the holdout for the
// scheduler's validation signal and reports holdout accuracy.
FoldResult run_fold(const ModelConfig& model_config, const TrainConfig& train_config,
                    std::size_t bpe_merges, const Fold& fold, std::size_t fold_index);

KFoldResult run_kfold(const ModelConfig& model_config, const TrainConfig& train_config,
                      std::size_t bpe_merges, std::span<const LabeledDocument> docs);

}  // namespace stylo
