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

#include "stylo/cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <optional>
#include <ostream>
#include <vector>

#include "stylo/bpe.hpp"
#include "stylo/checkpoint.hpp"
#include "stylo/corpus.hpp"
#include "stylo/error.hpp"
#include "stylo/train.hpp"
#include "stylo/utf8.hpp"

namespace stylo::cli {
namespace {

// Shortest text that reads back to the same double; keeps CSVs byte-stable.
std::string fmt(double value) {
  char buf[32];
  const auto end = std::to_chars(buf, buf + sizeof buf, value).ptr;
  return std::string(buf, end);
}

std::vector<LabeledDocument> load_dataset(const RunConfig& config) {
  require_input(config.paths.dataset, "--dataset");
  return load_jsonl(config.paths.dataset);
}

DatasetSplit split_dataset(const RunConfig& config, const std::vector<LabeledDocument>& docs) {
  return split_stratified(docs, SplitRatios{}, config.train.seed);
}

}  // namespace

void cmd_train_bpe(const RunConfig& config, std::ostream& out) {
  require_output(config.paths.merges, "--merges");
  const auto docs = load_dataset(config);
  const auto split = split_dataset(config, docs);
  const auto bpe = train_bpe(split.train, config.bpe_merges);
  save_merges(bpe, config.paths.merges);
  out << "merges " << bpe.merges().size() << "\n"
      << "vocab_size " << bpe.vocab_size() << "\n";
}

void cmd_train(const RunConfig& config, std::ostream& out) {
  require_input(config.paths.merges, "--merges");
  require_output(config.paths.checkpoint, "--checkpoint");
  require_output(config.paths.metrics, "--metrics");
  config.validate_numbers();

  const auto docs = load_dataset(config);
  const auto split = split_dataset(config, docs);
  const auto bpe = load_merges(config.paths.merges);
  const auto labels = LabelMap::from_documents(split.train);
  const auto model_config = resolve_model_config(config.model, bpe, labels);
  model_config.validate();

  std::ofstream metrics(config.paths.metrics, std::ios::trunc);
  if (!metrics) throw Error("cannot write metrics file: " + config.paths.metrics.string());
  metrics << "epoch,train_loss,val_loss,val_acc,lr\n" << std::flush;

  TrainCallbacks callbacks;
  callbacks.on_epoch = [&](const EpochRow& row) {
    metrics << row.epoch << ',' << fmt(row.train_loss) << ',' << fmt(row.val_loss) << ','
            << fmt(row.val_accuracy) << ',' << fmt(row.learning_rate) << '\n'
            << std::flush;
    out << "epoch " << row.epoch << " train_loss " << fmt(row.train_loss) << " val_loss "
        << fmt(row.val_loss) << " val_acc " << fmt(row.val_accuracy) << " lr "
        << fmt(row.learning_rate) << "\n";
  };
  auto result = train(model_config, config.train, bpe, split, callbacks);

  Checkpoint checkpoint{model_config, result.labels.authors(), bpe, std::move(result.params)};
  save_checkpoint(checkpoint, config.paths.checkpoint);
  if (result.report.test_accuracy) {
    out << "test_accuracy " << fmt(*result.report.test_accuracy) << "\n";
  } else {
    out << "test_accuracy n/a (empty test split)\n";
  }
}

EvalScope parse_eval_scope(std::string_view name) {
  if (name == "all") return EvalScope::kAll;
  if (name == "train") return EvalScope::kTrain;
  if (name == "validation") return EvalScope::kValidation;
  if (name == "test") return EvalScope::kTest;
  throw UsageError("--split must be one of all, train, validation, test");
}

void cmd_evaluate(const RunConfig& config, EvalScope scope, std::ostream& out) {
  require_input(config.paths.checkpoint, "--checkpoint");
  const auto checkpoint = load_checkpoint(config.paths.checkpoint);
  auto docs = load_dataset(config);
  if (scope != EvalScope::kAll) {
    auto split = split_dataset(config, docs);
    docs = scope == EvalScope::kTrain        ? std::move(split.train)
           : scope == EvalScope::kValidation ? std::move(split.validation)
                                             : std::move(split.test);
    if (docs.empty()) throw UsageError("selected split is empty");
  }

  const LabelMap labels(checkpoint.authors);
  if (const auto unknown = labels.unknown(docs); !unknown.empty()) {
    std::string list;
    for (const auto& a : unknown) list += (list.empty() ? "" : ", ") + a;
    throw UsageError("dataset has authors unknown to the checkpoint: " + list);
  }
  const auto encoded = encode_documents(docs, checkpoint.tokenizer, labels);
  const auto eval =
      evaluate_encoded(checkpoint.params, checkpoint.config, encoded, labels.size());

  out << "documents " << docs.size() << "\n"
      << "accuracy " << fmt(eval.accuracy) << "\n"
      << "mean_loss " << fmt(eval.mean_loss) << "\n";

  std::size_t width = 6;
  for (const auto& a : labels.authors()) width = std::max(width, a.size());
  out << std::left << std::setw(static_cast<int>(width)) << "author"
      << "  support  precision  recall\n";
  const auto m = labels.size();
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t support = 0, predicted = 0;
    for (std::size_t p = 0; p < m; ++p) support += eval.confusion[c][p];
    for (std::size_t t = 0; t < m; ++t) predicted += eval.confusion[t][c];
    const auto hit = eval.confusion[c][c];
    // Undefined ratios (no predictions / no documents) print as 0.
    const double precision = predicted ? static_cast<double>(hit) / predicted : 0.0;
    const double recall = support ? static_cast<double>(hit) / support : 0.0;
    out << std::left << std::setw(static_cast<int>(width)) << labels.author(c) << "  "
        << std::right << std::setw(7) << support << "  " << std::fixed
        << std::setprecision(4) << std::setw(9) << precision << "  " << std::setw(6)
        << recall << "\n"
        << std::defaultfloat;
  }
}

void cmd_predict(const RunConfig& config, const std::string& text, std::ostream& out) {
  require_input(config.paths.checkpoint, "--checkpoint");
  if (utf8::is_blank(text)) throw UsageError("--text is empty");
  const auto checkpoint = load_checkpoint(config.paths.checkpoint);
  const auto ids = checkpoint.tokenizer.encode(text);
  const auto values = predict_proba(checkpoint.params, checkpoint.config, ids);

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Stable so equal probabilities keep label order; the top entry is argmax.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  for (auto i : order) out << checkpoint.authors[i] << '\t' << fmt(values[i]) << "\n";
}

void cmd_stats(const RunConfig& config, std::ostream& out) {
  const auto docs = load_dataset(config);
  std::optional<BpeModel> bpe;
  if (!config.paths.merges.empty()) {
    require_input(config.paths.merges, "--merges");
    bpe = load_merges(config.paths.merges);
  }
  const auto stats = corpus_stats(docs, bpe ? &*bpe : nullptr);
  out << "n,w,c,t\n"
      << stats.n_authors << ',' << fmt(stats.mean_tokens_per_doc) << ','
      << fmt(stats.mean_chars_per_doc) << ',' << stats.n_documents << "\n";
}

}  // namespace stylo::cli
