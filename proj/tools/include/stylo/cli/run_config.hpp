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
#include <filesystem>
#include <string>
#include <string_view>

#include "stylo/error.hpp"
#include "stylo/model.hpp"
#include "stylo/train.hpp"

namespace stylo::cli {

// Thrown for bad invocations and inputs that fail validation; maps to exit
// code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunPaths {
  std::filesystem::path dataset;
  std::filesystem::path merges;
  std::filesystem::path checkpoint;
  std::filesystem::path metrics;
};

inline constexpr std::size_t kDefaultBpeMerges = 8000;

// Everything one invocation needs. The config file is a JSON object
//   {"model": {...}, "train": {...}, "paths": {...}, "bpe_merges": N}
// where every section and key is optional and missing keys keep defaults.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  RunPaths paths;
  std::size_t bpe_merges = kDefaultBpeMerges;

  std::string to_json() const;
  static RunConfig from_json(std::string_view text);
  static RunConfig from_file(const std::filesystem::path& path);

  // `assignment` is "key=value" with a dotted key: "model.embed_dim=32",
  // "train.epochs=5", "paths.dataset=x.jsonl" or "bpe_merges=100". The value
  // is read as JSON when it parses, as a string otherwise.
  void apply_override(std::string_view assignment);

  // Numeric invariants of both configs. vocab_size and n_authors come from
  // the data later, so they are not checked here.
  void validate_numbers() const;
};

// UsageError naming `flag` when `path` is empty or does not exist.
void require_input(const std::filesystem::path& path, std::string_view flag);
// UsageError naming `flag` when `path` is empty.
void require_output(const std::filesystem::path& path, std::string_view flag);

}  // namespace stylo::cli
