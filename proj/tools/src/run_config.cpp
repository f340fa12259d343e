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

#include "stylo/cli/run_config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "stylo/checkpoint.hpp"
#include "stylo/error.hpp"

namespace stylo::cli {
namespace {

using Json = nlohmann::ordered_json;

Json paths_json(const RunPaths& p) {
  Json j = Json::object();
  j["dataset"] = p.dataset.string();
  j["merges"] = p.merges.string();
  j["checkpoint"] = p.checkpoint.string();
  j["metrics"] = p.metrics.string();
  return j;
}

RunPaths paths_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("'paths' must be a JSON object");
  RunPaths p;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_string()) throw ConfigError("'paths." + key + "' must be a string");
    const auto s = value.get<std::string>();
    if (key == "dataset") {
      p.dataset = s;
    } else if (key == "merges") {
      p.merges = s;
    } else if (key == "checkpoint") {
      p.checkpoint = s;
    } else if (key == "metrics") {
      p.metrics = s;
    } else {
      throw ConfigError("unknown paths key '" + key + "'");
    }
  }
  return p;
}

}  // namespace

std::string RunConfig::to_json() const {
  Json j = Json::object();
  j["model"] = Json::parse(model_config_to_json(model));
  j["train"] = Json::parse(train_config_to_json(train));
  j["paths"] = paths_json(paths);
  j["bpe_merges"] = bpe_merges;
  return j.dump(2);
}

RunConfig RunConfig::from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig config;
  for (const auto& [key, value] : j.items()) {
    if (key == "model") {
      config.model = model_config_from_json(value.dump());
    } else if (key == "train") {
      config.train = train_config_from_json(value.dump());
    } else if (key == "paths") {
      config.paths = paths_from_json(value);
    } else if (key == "bpe_merges") {
      if (!value.is_number_unsigned()) {
        throw ConfigError("'bpe_merges' must be a non-negative integer");
      }
      config.bpe_merges = value.get<std::size_t>();
    } else {
      throw ConfigError("unknown config section '" + key + "'");
    }
  }
  return config;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return from_json(text.str());
}

void RunConfig::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw UsageError("--set expects key=value, got '" + std::string(assignment) + "'");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  Json value = Json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = raw;

  Json doc = Json::parse(to_json());
  const auto dot = key.find('.');
  if (dot == std::string::npos) {
    if (!doc.contains(key) || doc[key].is_object()) {
      throw UsageError("unknown config key '" + key + "'");
    }
    doc[key] = value;
  } else {
    const auto section = key.substr(0, dot);
    const auto field = key.substr(dot + 1);
    if (!doc.contains(section) || !doc[section].is_object() ||
        !doc[section].contains(field)) {
      throw UsageError("unknown config key '" + key + "'");
    }
    // Paths are always strings, even when they look like numbers.
    doc[section][field] = section == "paths" ? Json(raw) : value;
  }
  *this = from_json(doc.dump());
}

void RunConfig::validate_numbers() const {
  ModelConfig probe = model;
  probe.vocab_size = std::max<std::size_t>(probe.vocab_size, 2);
  probe.n_authors = std::max<std::size_t>(probe.n_authors, 1);
  probe.validate();
  train.validate();
}

void require_input(const std::filesystem::path& path, std::string_view flag) {
  if (path.empty()) throw UsageError("missing required " + std::string(flag));
  if (!std::filesystem::exists(path)) {
    throw UsageError(std::string(flag) + " path does not exist: " + path.string());
  }
}

void require_output(const std::filesystem::path& path, std::string_view flag) {
  if (path.empty()) throw UsageError("missing required " + std::string(flag));
}

}  // namespace stylo::cli
