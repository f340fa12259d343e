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

#include <iosfwd>
#include <string>
#include <string_view>

#include "stylo/cli/run_config.hpp"

namespace stylo::cli {

enum ExitCode : int { kSuccess = 0, kRuntimeFailure = 1, kUsageError = 2 };

// Fits the tokenizer on the training split of paths.dataset and writes
// paths.merges. Prints the vocabulary size.
void cmd_train_bpe(const RunConfig& config, std::ostream& out);

// Split, train, test. Streams one metrics CSV row per epoch to paths.metrics
// and writes paths.checkpoint. Prints the final test accuracy.
void cmd_train(const RunConfig& config, std::ostream& out);

// Which part of the dataset file `evaluate` scores.
enum class EvalScope { kAll, kTrain, kValidation, kTest };
EvalScope parse_eval_scope(std::string_view name);

// Scores paths.checkpoint on paths.dataset (or one split of it). Prints the
// accuracy and a per-author precision/recall table.
void cmd_evaluate(const RunConfig& config, EvalScope scope, std::ostream& out);

// Prints every author with its probability, most probable first.
void cmd_predict(const RunConfig& config, const std::string& text, std::ostream& out);

// Prints the n, w, c, t row for paths.dataset. Token counts use the merges
// file when one is given, whitespace words otherwise.
void cmd_stats(const RunConfig& config, std::ostream& out);

// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stylo::cli
