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

#include <gtest/gtest.h>

#include <filesystem>

#include "json.hpp"
#include "stylo/checkpoint.hpp"
#include "stylo/error.hpp"

namespace stylo {
namespace {

Checkpoint make_checkpoint() {
  const std::vector<LabeledDocument> docs{{"ann", "the quick brown fox"},
                                          {"bo", "jumps over the lazy dog"}};
  Checkpoint cp;
  cp.tokenizer = train_bpe(docs, 5);
  cp.authors = {"ann", "bo"};
  cp.config.vocab_size = cp.tokenizer.vocab_size();
  cp.config.n_authors = 2;
  cp.config.embed_dim = 4;
  cp.config.hidden_units = 4;
  cp.config.conv_filters = 2;
  cp.config.max_seq_len = 6;
  cp.config.combine = Combine::kConcat;
  Rng rng(3);
  cp.params = init_params(cp.config, rng);
  return cp;
}

std::string with_param_shape(const std::string& text, const std::string& name, Shape shape) {
  auto j = nlohmann::ordered_json::parse(text);
  for (auto& p : j["params"]) {
    if (p["name"] == name) {
      p["shape"] = shape;
      p["values"] = std::vector<double>(shape_size(shape), 0.0);
    }
  }
  return j.dump();
}

TEST(Checkpoint, RoundTripIsExact) {
  const auto cp = make_checkpoint();
  const auto text = checkpoint_to_string(cp);
  const auto back = checkpoint_from_string(text);
  EXPECT_EQ(back.config, cp.config);
  EXPECT_EQ(back.authors, cp.authors);
  EXPECT_EQ(back.tokenizer.merges(), cp.tokenizer.merges());
  const auto a = cp.params.named();
  const auto b = back.params.named();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].name, b[i].name);
    EXPECT_TRUE(std::equal(a[i].tensor.values().begin(), a[i].tensor.values().end(),
                           b[i].tensor.values().begin()))
        << a[i].name;
  }
  EXPECT_EQ(checkpoint_to_string(back), text);

  const auto path = std::filesystem::temp_directory_path() / "stylo_checkpoint.json";
  save_checkpoint(cp, path);
  EXPECT_EQ(checkpoint_to_string(load_checkpoint(path)), text);
}

TEST(Checkpoint, LoadedModelPredictsIdentically) {
  const auto cp = make_checkpoint();
  const auto back = checkpoint_from_string(checkpoint_to_string(cp));
  const auto ids = cp.tokenizer.encode("the lazy fox");
  EXPECT_EQ(predict_proba(cp.params, cp.config, ids),
            predict_proba(back.params, back.config, ids));
}

TEST(Checkpoint, ShapeMismatchNamesTensor) {
  const auto text = checkpoint_to_string(make_checkpoint());
  try {
    checkpoint_from_string(with_param_shape(text, "conv.1.filter", {2, 2}));
    FAIL();
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("conv.1.filter"), std::string::npos) << e.what();
  }
}

TEST(Checkpoint, MissingAndExtraTensorsRejected) {
  const auto text = checkpoint_to_string(make_checkpoint());
  auto j = nlohmann::ordered_json::parse(text);
  auto& params = j["params"];
  params.erase(params.begin() + 3);
  EXPECT_THROW(checkpoint_from_string(j.dump()), ShapeError);

  j = nlohmann::ordered_json::parse(text);
  j["params"].push_back({{"name", "bogus"}, {"shape", {1}}, {"values", {0.0}}});
  try {
    checkpoint_from_string(j.dump());
    FAIL();
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
}

TEST(Checkpoint, AuthorAndVocabCountsMustAgree) {
  const auto text = checkpoint_to_string(make_checkpoint());
  auto j = nlohmann::ordered_json::parse(text);
  j["authors"].push_back("cy");
  EXPECT_THROW(checkpoint_from_string(j.dump()), ShapeError);
  j = nlohmann::ordered_json::parse(text);
  j["model"]["vocab_size"] = 3;
  EXPECT_THROW(checkpoint_from_string(j.dump()), Error);
  j = nlohmann::ordered_json::parse(text);
  j["format"] = 99;
  EXPECT_THROW(checkpoint_from_string(j.dump()), Error);
  EXPECT_THROW(checkpoint_from_string("not json"), Error);
}

TEST(ConfigJson, RoundTripsAndOverridesDefaults) {
  ModelConfig m;
  m.embed_dim = 17;
  m.combine = Combine::kConcat;
  m.noise_anneal_gamma = 0.55;
  EXPECT_EQ(model_config_from_json(model_config_to_json(m)), m);

  const auto partial = model_config_from_json(R"({"hidden_units": 9})");
  EXPECT_EQ(partial.hidden_units, 9u);
  EXPECT_EQ(partial.embed_dim, 64u);

  TrainConfig t;
  t.seed = 1234567890123ull;
  t.learning_rate = 3e-4;
  t.plateau.patience = 2;
  EXPECT_EQ(train_config_from_json(train_config_to_json(t)), t);
}

TEST(ConfigJson, RejectsUnknownKeysAndWrongTypes) {
  EXPECT_THROW(model_config_from_json(R"({"embed_dims": 3})"), ConfigError);
  EXPECT_THROW(model_config_from_json(R"({"embed_dim": -3})"), ConfigError);
  EXPECT_THROW(model_config_from_json(R"({"embed_dim": "3"})"), ConfigError);
  EXPECT_THROW(model_config_from_json(R"({"combine": "max"})"), ConfigError);
  EXPECT_THROW(train_config_from_json(R"({"epochs": 1.5})"), ConfigError);
  EXPECT_THROW(train_config_from_json("[1]"), ConfigError);
}

}  // namespace
}  // namespace stylo
