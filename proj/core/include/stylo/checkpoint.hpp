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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "stylo/bpe.hpp"
#include "stylo/model.hpp"
#include "stylo/train.hpp"

namespace stylo {

inline constexpr int kCheckpointFormat = 1;

// Everything needed to run inference: architecture, tokenizer, label order
// and weights.
struct Checkpoint {
  ModelConfig config;
  std::vector<std::string> authors;
  BpeModel tokenizer;
  ModelParams params;
};

// JSON document:
//   {"format": 1, "model": {...}, "authors": [...], "merges": "<merges file>",
//    "params": [{"name": ..., "shape": [...], "values": [...]}, ...]}
// Numbers are written with round-trip precision, so save/load is exact.
std::string checkpoint_to_string(const Checkpoint& checkpoint);

// Rejects unknown formats, configs that fail validation, and any tensor whose
// shape disagrees with the embedded config (ShapeError naming the tensor).
Checkpoint checkpoint_from_string(std::string_view text);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Flat JSON objects for the configs. Parsing starts from the defaults and
// overrides the keys present; unknown keys and wrong types throw ConfigError.
std::string model_config_to_json(const ModelConfig& config);
ModelConfig model_config_from_json(std::string_view json_object,
                                   const ModelConfig& base = {});
std::string train_config_to_json(const TrainConfig& config);
TrainConfig train_config_from_json(std::string_view json_object,
                                   const TrainConfig& base = {});

}  // namespace stylo
