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

#include "stylo/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stylo/error.hpp"

namespace stylo {
namespace {

using Json = nlohmann::ordered_json;

Json parse_object(std::string_view text, const char* what) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
  return j;
}

// Reads j[key] into `out` when present.
template <typename T>
void read(const Json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
      if (!it->is_number_unsigned()) {
        throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
      }
    } else if constexpr (std::is_same_v<T, double>) {
      if (!it->is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    }
    out = it->get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("'") + key + "' has the wrong type");
  }
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known,
                    const char* what) {
  for (const auto& [key, value] : j.items()) {
    bool found = false;
    for (const char* k : known) found = found || key == k;
    if (!found) throw ConfigError(std::string("unknown ") + what + " key '" + key + "'");
  }
}

Json model_json(const ModelConfig& c) {
  Json j;
  j["vocab_size"] = c.vocab_size;
  j["embed_dim"] = c.embed_dim;
  j["hidden_units"] = c.hidden_units;
  j["conv_filters"] = c.conv_filters;
  j["filter_rows"] = c.filter_rows;
  j["filter_cols"] = c.filter_cols;
  j["pool_rows"] = c.pool_rows;
  j["pool_cols"] = c.pool_cols;
  j["max_seq_len"] = c.max_seq_len;
  j["n_authors"] = c.n_authors;
  j["embed_dropout"] = c.embed_dropout;
  j["blstm_dropout"] = c.blstm_dropout;
  j["penultimate_dropout"] = c.penultimate_dropout;
  j["noise_sigma"] = c.noise_sigma;
  j["noise_anneal_gamma"] = c.noise_anneal_gamma;
  j["combine"] = c.combine == Combine::kSum ? "sum" : "concat";
  return j;
}

ModelConfig model_from_json(const Json& j, ModelConfig c) {
  reject_unknown(j,
                 {"vocab_size", "embed_dim", "hidden_units", "conv_filters", "filter_rows",
                  "filter_cols", "pool_rows", "pool_cols", "max_seq_len", "n_authors",
                  "embed_dropout", "blstm_dropout", "penultimate_dropout", "noise_sigma",
                  "noise_anneal_gamma", "combine"},
                 "model");
  read(j, "vocab_size", c.vocab_size);
  read(j, "embed_dim", c.embed_dim);
  read(j, "hidden_units", c.hidden_units);
  read(j, "conv_filters", c.conv_filters);
  read(j, "filter_rows", c.filter_rows);
  read(j, "filter_cols", c.filter_cols);
  read(j, "pool_rows", c.pool_rows);
  read(j, "pool_cols", c.pool_cols);
  read(j, "max_seq_len", c.max_seq_len);
  read(j, "n_authors", c.n_authors);
  read(j, "embed_dropout", c.embed_dropout);
  read(j, "blstm_dropout", c.blstm_dropout);
  read(j, "penultimate_dropout", c.penultimate_dropout);
  read(j, "noise_sigma", c.noise_sigma);
  read(j, "noise_anneal_gamma", c.noise_anneal_gamma);
  if (auto it = j.find("combine"); it != j.end()) {
    if (*it == "sum") {
      c.combine = Combine::kSum;
    } else if (*it == "concat") {
      c.combine = Combine::kConcat;
    } else {
      throw ConfigError("'combine' must be \"sum\" or \"concat\"");
    }
  }
  return c;
}

Json train_json(const TrainConfig& c) {
  Json j;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["adam_beta1"] = c.adam.beta1;
  j["adam_beta2"] = c.adam.beta2;
  j["adam_epsilon"] = c.adam.epsilon;
  j["l2_lambda"] = c.l2_lambda;
  j["epochs"] = c.epochs;
  j["plateau_patience"] = c.plateau.patience;
  j["plateau_factor"] = c.plateau.factor;
  j["plateau_min_lr"] = c.plateau.min_lr;
  j["seed"] = c.seed;
  j["kfold"] = c.kfold;
  return j;
}

TrainConfig train_from_json(const Json& j, TrainConfig c) {
  reject_unknown(j,
                 {"batch_size", "learning_rate", "adam_beta1", "adam_beta2", "adam_epsilon",
                  "l2_lambda", "epochs", "plateau_patience", "plateau_factor",
                  "plateau_min_lr", "seed", "kfold"},
                 "train");
  read(j, "batch_size", c.batch_size);
  read(j, "learning_rate", c.learning_rate);
  read(j, "adam_beta1", c.adam.beta1);
  read(j, "adam_beta2", c.adam.beta2);
  read(j, "adam_epsilon", c.adam.epsilon);
  read(j, "l2_lambda", c.l2_lambda);
  read(j, "epochs", c.epochs);
  read(j, "plateau_patience", c.plateau.patience);
  read(j, "plateau_factor", c.plateau.factor);
  read(j, "plateau_min_lr", c.plateau.min_lr);
  read(j, "seed", c.seed);
  read(j, "kfold", c.kfold);
  return c;
}

}  // namespace

std::string model_config_to_json(const ModelConfig& config) {
  return model_json(config).dump();
}

ModelConfig model_config_from_json(std::string_view json_object, const ModelConfig& base) {
  return model_from_json(parse_object(json_object, "model config"), base);
}

std::string train_config_to_json(const TrainConfig& config) {
  return train_json(config).dump();
}

TrainConfig train_config_from_json(std::string_view json_object, const TrainConfig& base) {
  return train_from_json(parse_object(json_object, "train config"), base);
}

std::string checkpoint_to_string(const Checkpoint& checkpoint) {
  checkpoint.params.audit(checkpoint.config);
  Json j;
  j["format"] = kCheckpointFormat;
  j["model"] = model_json(checkpoint.config);
  j["authors"] = checkpoint.authors;
  j["merges"] = merges_to_string(checkpoint.tokenizer);
  Json params = Json::array();
  for (const auto& named : checkpoint.params.named()) {
    Json p;
    p["name"] = named.name;
    p["shape"] = named.tensor.shape();
    p["values"] = std::vector<double>(named.tensor.values().begin(),
                                      named.tensor.values().end());
    params.push_back(std::move(p));
  }
  j["params"] = std::move(params);
  return j.dump() + "\n";
}

Checkpoint checkpoint_from_string(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ParseError(std::string("checkpoint is not valid JSON: ") + e.what(), 0);
  }
  try {
    if (!j.is_object() || !j.contains("format")) {
      throw ParseError("checkpoint has no 'format' field", 0);
    }
    if (j["format"] != kCheckpointFormat) {
      throw ParseError("unsupported checkpoint format " + j["format"].dump(), 0);
    }
    for (const char* key : {"model", "authors", "merges", "params"}) {
      if (!j.contains(key)) throw ParseError(std::string("checkpoint lacks '") + key + "'", 0);
    }

    Checkpoint cp;
    cp.config = model_from_json(j["model"], ModelConfig{});
    cp.config.validate();
    cp.authors = j["authors"].get<std::vector<std::string>>();
    cp.tokenizer = merges_from_string(j["merges"].get<std::string>());
    if (cp.tokenizer.vocab_size() != cp.config.vocab_size) {
      throw ShapeError("checkpoint tokenizer has " +
                       std::to_string(cp.tokenizer.vocab_size()) +
                       " tokens but the config says vocab_size " +
                       std::to_string(cp.config.vocab_size));
    }
    if (cp.authors.size() != cp.config.n_authors) {
      throw ShapeError("checkpoint lists " + std::to_string(cp.authors.size()) +
                       " authors but the config says n_authors " +
                       std::to_string(cp.config.n_authors));
    }

    std::map<std::string, const Json*> stored;
    for (const auto& p : j["params"]) stored[p.at("name").get<std::string>()] = &p;

    std::vector<Tensor> tensors;
    for (const auto& [name, shape] : ModelParams::expected_shapes(cp.config)) {
      auto it = stored.find(name);
      if (it == stored.end()) throw ShapeError("checkpoint lacks tensor '" + name + "'");
      const auto stored_shape = it->second->at("shape").get<Shape>();
      if (stored_shape != shape) {
        throw ShapeError("tensor '" + name + "' has shape " + shape_string(stored_shape) +
                         " but the config implies " + shape_string(shape));
      }
      auto values = it->second->at("values").get<std::vector<double>>();
      if (values.size() != shape_size(shape)) {
        throw ShapeError("tensor '" + name + "' holds " + std::to_string(values.size()) +
                         " values, shape needs " + std::to_string(shape_size(shape)));
      }
      tensors.push_back(Tensor::from(shape, std::move(values), true));
      stored.erase(it);
    }
    if (!stored.empty()) {
      throw ShapeError("checkpoint has unexpected tensor '" + stored.begin()->first + "'");
    }

    // Tensors arrive in ModelParams::named() order.
    std::size_t next = 0;
    auto take = [&]() { return tensors[next++]; };
    ModelParams& p = cp.params;
    p.embedding = take();
    for (auto* dir : {&p.forward_lstm, &p.backward_lstm}) {
      for (Tensor* slot : {&dir->w_xf, &dir->w_hf, &dir->b_f, &dir->w_xi, &dir->w_hi,
                           &dir->b_i, &dir->w_xo, &dir->w_ho, &dir->b_o, &dir->w_xc,
                           &dir->w_hc, &dir->b_c}) {
        *slot = take();
      }
    }
    p.w_combine = take();
    p.b_combine = take();
    for (std::size_t f = 0; f < cp.config.conv_filters; ++f) {
      p.filters.push_back(take());
      p.filter_bias.push_back(take());
    }
    p.w_classifier = take();
    p.b_classifier = take();
    p.audit(cp.config);
    return cp;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed checkpoint: ") + e.what(), 0);
  }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  const std::string text = checkpoint_to_string(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint: " + path.string());
  out << text;
  if (!out) throw Error("failed writing checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return checkpoint_from_string(buffer.str());
}

}  // namespace stylo
