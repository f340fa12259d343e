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

#include <exception>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stylo/cli/commands.hpp"
#include "stylo/error.hpp"

namespace stylo::cli {
namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string dataset;
  std::string merges;
  std::string checkpoint;
  std::string metrics;
  std::vector<std::string> overrides;
  std::string text;
  std::string split = "all";
};

// Config file first, then --set overrides, then the dedicated flags.
RunConfig resolve(const Flags& flags) {
  RunConfig config;
  if (!flags.config.empty()) {
    require_input(flags.config, "--config");
    config = RunConfig::from_file(flags.config);
  }
  for (const auto& o : flags.overrides) config.apply_override(o);
  if (flags.seed) config.train.seed = *flags.seed;
  if (!flags.dataset.empty()) config.paths.dataset = flags.dataset;
  if (!flags.merges.empty()) config.paths.merges = flags.merges;
  if (!flags.checkpoint.empty()) config.paths.checkpoint = flags.checkpoint;
  if (!flags.metrics.empty()) config.paths.metrics = flags.metrics;
  config.validate_numbers();
  return config;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subword BLSTM-CNN authorship attribution", "stylo"};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--config", flags.config, "JSON run config");
  app.add_option("--seed", flags.seed, "Seed for splitting, initialisation and training");
  app.add_option("--dataset", flags.dataset, "JSONL dataset with author/text records");
  app.add_option("--merges", flags.merges, "BPE merges file");
  app.add_option("--checkpoint", flags.checkpoint, "Model checkpoint");
  app.add_option("--metrics", flags.metrics, "Per-epoch metrics CSV");
  app.add_option("--set", flags.overrides, "Override one config key: section.key=value")
      ->take_all()
      ->allow_extra_args(false);

  auto* train_bpe = app.add_subcommand("train-bpe", "Fit the tokenizer on the training split");
  auto* train = app.add_subcommand("train", "Train a model and score it on the test split");
  auto* evaluate = app.add_subcommand("evaluate", "Score a checkpoint on a dataset");
  evaluate->add_option("--split", flags.split, "all, train, validation or test");
  auto* predict = app.add_subcommand("predict", "Rank authors for one text");
  predict->add_option("--text", flags.text, "Text to attribute")->required();
  auto* stats = app.add_subcommand("stats", "Dataset statistics row (n, w, c, t)");
  for (auto* sub : {train_bpe, train, evaluate, predict, stats}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    const RunConfig config = resolve(flags);
    if (train_bpe->parsed()) {
      cmd_train_bpe(config, out);
    } else if (train->parsed()) {
      cmd_train(config, out);
    } else if (evaluate->parsed()) {
      cmd_evaluate(config, parse_eval_scope(flags.split), out);
    } else if (predict->parsed()) {
      cmd_predict(config, flags.text, out);
    } else {
      cmd_stats(config, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << "\n";
    return kUsageError;
  } catch (const CorpusError& e) {
    err << "dataset error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kSuccess;
}

}  // namespace stylo::cli
