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

#include "stylo/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

#include "stylo/error.hpp"
#include "stylo/ops.hpp"

namespace stylo {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError("invalid train config: " + message);
}

std::vector<Tensor> parameter_list(const ModelParams& params) {
  std::vector<Tensor> out;
  for (const auto& named : params.named()) out.push_back(named.tensor);
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  require(batch_size >= 1, "batch_size must be >= 1");
  require(learning_rate > 0.0, "learning_rate must be > 0");
  require(adam.beta1 > 0.0 && adam.beta1 < 1.0, "adam beta1 must lie in (0, 1)");
  require(adam.beta2 > 0.0 && adam.beta2 < 1.0, "adam beta2 must lie in (0, 1)");
  require(adam.epsilon > 0.0, "adam epsilon must be > 0");
  require(l2_lambda >= 0.0, "l2_lambda must be >= 0");
  require(plateau.patience >= 1, "plateau patience must be >= 1");
  require(plateau.factor > 0.0 && plateau.factor < 1.0, "plateau factor must lie in (0, 1)");
  require(plateau.min_lr >= 0.0, "plateau min_lr must be >= 0");
  require(kfold >= 2, "kfold must be >= 2");
}

LabelMap::LabelMap(std::vector<std::string> authors) : authors_(std::move(authors)) {
  std::sort(authors_.begin(), authors_.end());
  authors_.erase(std::unique(authors_.begin(), authors_.end()), authors_.end());
}

LabelMap LabelMap::from_documents(std::span<const LabeledDocument> docs) {
  return LabelMap(author_labels(docs));
}

std::size_t LabelMap::index_of(const std::string& author) const {
  auto it = std::lower_bound(authors_.begin(), authors_.end(), author);
  if (it == authors_.end() || *it != author) {
    throw CorpusError("unknown author label '" + author + "'");
  }
  return static_cast<std::size_t>(it - authors_.begin());
}

std::vector<std::string> LabelMap::unknown(std::span<const LabeledDocument> docs) const {
  std::set<std::string> missing;
  for (const auto& doc : docs) {
    if (!std::binary_search(authors_.begin(), authors_.end(), doc.author)) {
      missing.insert(doc.author);
    }
  }
  return {missing.begin(), missing.end()};
}

std::vector<EncodedDocument> encode_documents(std::span<const LabeledDocument> docs,
                                              const BpeModel& bpe, const LabelMap& labels) {
  std::vector<EncodedDocument> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) {
    out.push_back({bpe.encode(doc.text), labels.index_of(doc.author)});
  }
  return out;
}

Tensor l2_penalty(const ModelParams& params, double lambda) {
  std::vector<Tensor> terms;
  for (const auto& named : params.named()) {
    if (!named.is_weight) continue;
    const std::size_t skip = named.tensor.same_as(params.embedding) ? 1 : 0;
    terms.push_back(ops::sum_squares(named.tensor, skip));
  }
  return ops::scale(ops::add_n(terms), lambda);
}

Tensor cross_entropy_l2(std::span<const Tensor> probs, std::span<const std::size_t> targets,
                        const ModelParams& params, double lambda) {
  if (probs.empty() || probs.size() != targets.size()) {
    throw ShapeError("cross_entropy_l2: " + std::to_string(probs.size()) +
                     " predictions for " + std::to_string(targets.size()) + " targets");
  }
  std::vector<Tensor> nll;
  nll.reserve(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    nll.push_back(ops::neg_log(probs[i], targets[i]));
  }
  const Tensor ce = ops::scale(ops::add_n(nll), 1.0 / static_cast<double>(probs.size()));
  if (lambda == 0.0) return ce;
  return ops::add(ce, l2_penalty(params, lambda));
}

ModelConfig resolve_model_config(ModelConfig config, const BpeModel& bpe,
                                 const LabelMap& labels) {
  config.vocab_size = bpe.vocab_size();
  config.n_authors = labels.size();
  return config;
}

Evaluation evaluate_encoded(const ModelParams& params, const ModelConfig& config,
                            std::span<const EncodedDocument> docs, std::size_t n_classes) {
  Evaluation e;
  e.confusion.assign(n_classes, std::vector<std::size_t>(n_classes, 0));
  if (docs.empty()) return e;
  std::size_t correct = 0;
  double loss = 0.0;
  for (const auto& doc : docs) {
    const auto probs = predict_proba(params, config, doc.ids);
    const std::size_t predicted = argmax(probs);
    e.predictions.push_back(predicted);
    e.confusion.at(doc.label).at(predicted) += 1;
    if (predicted == doc.label) ++correct;
    loss -= std::log(std::max(probs[doc.label], 1e-12));
  }
  const auto n = static_cast<double>(docs.size());
  e.accuracy = static_cast<double>(correct) / n;
  e.mean_loss = loss / n;
  return e;
}

double evaluate_accuracy(const ModelParams& params, const ModelConfig& config,
                         const BpeModel& bpe, std::span<const LabeledDocument> docs,
                         const LabelMap& labels) {
  const auto missing = labels.unknown(docs);
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw CorpusError("unknown author label(s): " + list);
  }
  const auto encoded = encode_documents(docs, bpe, labels);
  return evaluate_encoded(params, config, encoded, labels.size()).accuracy;
}

TrainResult train(const ModelConfig& model_config, const TrainConfig& train_config,
                  const BpeModel& bpe, const DatasetSplit& split,
                  const TrainCallbacks& callbacks) {
  const auto started = std::chrono::steady_clock::now();
  model_config.validate();
  train_config.validate();
  if (split.train.empty()) throw CorpusError("training split is empty");
  if (model_config.vocab_size != bpe.vocab_size()) {
    throw ConfigError("model vocab_size " + std::to_string(model_config.vocab_size) +
                      " does not match tokenizer vocabulary " +
                      std::to_string(bpe.vocab_size()));
  }

  TrainResult result;
  result.labels = LabelMap::from_documents(split.train);
  if (model_config.n_authors != result.labels.size()) {
    throw ConfigError("model n_authors " + std::to_string(model_config.n_authors) +
                      " does not match the " + std::to_string(result.labels.size()) +
                      " authors in the training split");
  }
  const auto train_docs = encode_documents(split.train, bpe, result.labels);
  const auto val_docs = encode_documents(split.validation, bpe, result.labels);

  Rng init_rng(Rng::derive(train_config.seed, 0));
  Rng rng(Rng::derive(train_config.seed, 1));
  result.params = init_params(model_config, init_rng);
  ModelParams& params = result.params;
  params.audit(model_config);

  Adam optimizer(parameter_list(params), train_config.adam);
  PlateauScheduler scheduler(train_config.plateau, train_config.learning_rate);
  double lr = train_config.learning_rate;

  std::vector<std::size_t> order(train_docs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch = train_config.batch_size;

  for (std::size_t epoch = 0; epoch < train_config.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    double epoch_loss = 0.0;
    for (std::size_t start = 0, b = 0; start < order.size(); start += batch, ++b) {
      const std::size_t end = std::min(start + batch, order.size());
      const double inv = 1.0 / static_cast<double>(end - start);
      optimizer.zero_grad();
      double batch_loss = 0.0;
      // Per-document graphs; gradients sum into the parameters.
      for (std::size_t n = start; n < end; ++n) {
        const auto& doc = train_docs[order[n]];
        const Tensor probs = forward_full(params, model_config, doc.ids, true, rng, epoch);
        const Tensor loss = ops::scale(ops::neg_log(probs, doc.label), inv);
        batch_loss += loss.item();
        backward(loss);
      }
      if (train_config.l2_lambda > 0.0) {
        const Tensor penalty = l2_penalty(params, train_config.l2_lambda);
        batch_loss += penalty.item();
        backward(penalty);
      }
      if (!std::isfinite(batch_loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch + 1) +
                           ", batch " + std::to_string(b + 1));
      }
      optimizer.step(lr);
      epoch_loss += batch_loss * static_cast<double>(end - start);
    }

    EpochRow row;
    row.epoch = epoch + 1;
    row.train_loss = epoch_loss / static_cast<double>(order.size());
    row.learning_rate = lr;
    if (!val_docs.empty()) {
      const auto eval = evaluate_encoded(params, model_config, val_docs, result.labels.size());
      row.val_loss = eval.mean_loss;
      row.val_accuracy = eval.accuracy;
    } else {
      row.val_loss = row.train_loss;
    }
    lr = scheduler.step(row.val_loss);
    result.report.epochs.push_back(row);
    if (callbacks.on_epoch) callbacks.on_epoch(row);
  }
  result.report.optimizer_steps = optimizer.steps();

  if (!split.test.empty()) {
    result.report.test_accuracy =
        evaluate_accuracy(params, model_config, bpe, split.test, result.labels);
  }
  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

FoldResult run_fold(const ModelConfig& model_config, const TrainConfig& train_config,
                    std::size_t bpe_merges, const Fold& fold, std::size_t fold_index) {
  const BpeModel bpe = train_bpe(fold.train, bpe_merges);
  const LabelMap labels = LabelMap::from_documents(fold.train);
  TrainConfig fold_config = train_config;
  fold_config.seed = train_config.seed + fold_index;

  DatasetSplit split;
  split.train = fold.train;
  split.validation = fold.holdout;
  split.seed = fold_config.seed;
  auto trained = train(resolve_model_config(model_config, bpe, labels), fold_config, bpe, split);

  FoldResult out;
  out.accuracy = evaluate_accuracy(trained.params,
                                   resolve_model_config(model_config, bpe, labels), bpe,
                                   fold.holdout, trained.labels);
  out.report = std::move(trained.report);
  out.report.test_accuracy = out.accuracy;
  return out;
}

KFoldResult run_kfold(const ModelConfig& model_config, const TrainConfig& train_config,
                      std::size_t bpe_merges, std::span<const LabeledDocument> docs) {
  train_config.validate();
  const auto folds = kfold_partitions(docs, train_config.kfold, train_config.seed);
  KFoldResult result;
  double total = 0.0;
  for (std::size_t i = 0; i < folds.size(); ++i) {
    result.folds.push_back(run_fold(model_config, train_config, bpe_merges, folds[i], i));
    total += result.folds.back().accuracy;
  }
  result.mean_accuracy = total / static_cast<double>(folds.size());
  return result;
}

}  // namespace stylo
