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
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "stylo/checkpoint.hpp"
#include "stylo/cli/commands.hpp"
#include "stylo/utf8.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;

namespace stylo::cli {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "stylo");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const fs::path kData = STYLO_TEST_DATA_DIR;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("stylo_cli_" + std::string(::testing::UnitTest::GetInstance()
                                           ->current_test_info()
                                           ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  fs::path path(const std::string& name) const { return dir_ / name; }

  // Small, fast model settings shared by the training tests.
  static std::vector<std::string> small_model() {
    return {"--set", "model.embed_dim=6",  "--set", "model.hidden_units=6",
            "--set", "model.conv_filters=3", "--set", "model.max_seq_len=12",
            "--set", "train.epochs=4",     "--set", "train.batch_size=8",
            "--set", "bpe_merges=30"};
  }

  // Writes a small synthetic corpus and fits merges; returns the dataset path.
  fs::path prepare_corpus() {
    const auto docs = testing::make_synthetic_corpus({.authors = 3,
                                                      .docs_per_author = 10,
                                                      .vocabulary_per_author = 6,
                                                      .shared_fraction = 0.0,
                                                      .min_words = 4,
                                                      .max_words = 8,
                                                      .seed = 5});
    save_jsonl(path("data.jsonl"), docs);
    auto args = small_model();
    args.insert(args.begin(), {"train-bpe", "--dataset", path("data.jsonl").string(),
                               "--merges", path("merges.txt").string()});
    EXPECT_EQ(run(args).code, 0);
    return path("data.jsonl");
  }

  Result train_model(const std::string& suffix = "") {
    auto args = small_model();
    args.insert(args.begin(),
                {"train", "--dataset", path("data.jsonl").string(), "--merges",
                 path("merges.txt").string(), "--checkpoint",
                 path("model" + suffix + ".json").string(), "--metrics",
                 path("metrics" + suffix + ".csv").string(), "--seed", "9"});
    return run(args);
  }

  fs::path dir_;
};

TEST_F(CliTest, TrainBpeOnTableOneFixture) {
  const auto merges = path("m.txt");
  const auto r = run({"train-bpe", "--dataset", (kData / "table1.jsonl").string(), "--merges",
                      merges.string(), "--set", "bpe_merges=6"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("vocab_size"), std::string::npos);
  const auto model = load_merges(merges);
  ASSERT_GE(model.merges().size(), 3u);
  EXPECT_EQ(model.merges()[0].result, "wo");
  EXPECT_EQ(model.merges()[1].result, "wor");
  EXPECT_EQ(model.merges()[2].result, "work");

  const auto first = slurp(merges);
  ASSERT_EQ(run({"train-bpe", "--dataset", (kData / "table1.jsonl").string(), "--merges",
                 merges.string(), "--set", "bpe_merges=6"})
                .code,
            0);
  EXPECT_EQ(slurp(merges), first);
}

TEST_F(CliTest, MissingDatasetIsUsageError) {
  const auto r = run({"train-bpe", "--dataset", "/no/such/corpus.jsonl", "--merges",
                      path("m.txt").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("/no/such/corpus.jsonl"), std::string::npos) << r.err;
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"fly"}).code, 2);
  EXPECT_EQ(run({"stats", "--seed", "abc"}).code, 2);
  EXPECT_EQ(run({"stats", "--set", "model.nope=1", "--dataset",
                 (kData / "five_authors.jsonl").string()})
                .code,
            2);
  EXPECT_EQ(run({"stats"}).code, 2);  // no dataset
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, BpeNeverSeesValidationOrTestText) {
  // Every document carries one private marker character.
  std::vector<LabeledDocument> docs;
  const std::string markers = "ABCDEFGHIJKLMNOPQRST";
  for (std::size_t i = 0; i < markers.size(); ++i) {
    docs.push_back({"au" + std::to_string(i % 2), std::string("abc ") + markers[i] + "ab"});
  }
  save_jsonl(path("marked.jsonl"), docs);
  ASSERT_EQ(run({"train-bpe", "--dataset", path("marked.jsonl").string(), "--merges",
                 path("m.txt").string(), "--seed", "4"})
                .code,
            0);
  const auto split = split_stratified(docs, SplitRatios{}, 4);
  std::set<std::string> train_chars;
  for (const auto& d : split.train) {
    for (const auto& c : utf8::code_points(d.text)) train_chars.insert(c);
  }
  const auto alphabet = load_merges(path("m.txt")).alphabet();
  for (const auto& c : alphabet) EXPECT_TRUE(train_chars.contains(c)) << c;
  EXPECT_EQ(alphabet.size() + 1, train_chars.size());  // minus the space
}

TEST_F(CliTest, TrainWritesCheckpointAndMetricsDeterministically) {
  prepare_corpus();
  const auto r = train_model();
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("test_accuracy"), std::string::npos);
  const auto metrics = slurp(path("metrics.csv"));
  EXPECT_EQ(metrics.rfind("epoch,train_loss,val_loss,val_acc,lr\n", 0), 0u);
  EXPECT_EQ(std::count(metrics.begin(), metrics.end(), '\n'), 5);
  const auto cp = load_checkpoint(path("model.json"));
  EXPECT_EQ(cp.authors.size(), 3u);

  ASSERT_EQ(train_model("2").code, 0);
  EXPECT_EQ(slurp(path("metrics2.csv")), metrics);
  EXPECT_EQ(slurp(path("model2.json")), slurp(path("model.json")));
}

TEST_F(CliTest, InvalidFilterCountFailsBeforeTraining) {
  prepare_corpus();
  auto args = small_model();
  args.insert(args.begin(), {"train", "--dataset", path("data.jsonl").string(), "--merges",
                             path("merges.txt").string(), "--checkpoint",
                             path("model.json").string(), "--metrics",
                             path("metrics.csv").string()});
  // Later overrides win, so this goes last.
  args.insert(args.end(), {"--set", "model.conv_filters=0"});
  const auto r = run(args);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("conv_filters"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("metrics.csv")));
  EXPECT_FALSE(fs::exists(path("model.json")));
}

TEST_F(CliTest, EvaluateReportsAccuracyAndPerAuthorTable) {
  prepare_corpus();
  ASSERT_EQ(train_model().code, 0);
  const auto r = run({"evaluate", "--checkpoint", path("model.json").string(), "--dataset",
                      path("data.jsonl").string(), "--seed", "9", "--split", "test"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("accuracy"), std::string::npos);
  EXPECT_NE(r.out.find("precision"), std::string::npos);
  EXPECT_NE(r.out.find("author2"), std::string::npos);
}

TEST_F(CliTest, EvaluateRejectsEmptyDatasetAndUnknownAuthors) {
  prepare_corpus();
  ASSERT_EQ(train_model().code, 0);
  std::ofstream(path("empty.jsonl")) << "\n";
  EXPECT_EQ(run({"evaluate", "--checkpoint", path("model.json").string(), "--dataset",
                 path("empty.jsonl").string()})
                .code,
            2);
  const auto r = run({"evaluate", "--checkpoint", path("model.json").string(), "--dataset",
                      (kData / "five_authors.jsonl").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("alice, bruno, chen, dara, emil"), std::string::npos) << r.err;
}

TEST_F(CliTest, CorruptCheckpointNamesTensor) {
  prepare_corpus();
  ASSERT_EQ(train_model().code, 0);
  auto j = nlohmann::ordered_json::parse(slurp(path("model.json")));
  j["model"]["hidden_units"] = 7;
  std::ofstream(path("bad.json")) << j.dump();
  const auto r = run({"predict", "--checkpoint", path("bad.json").string(), "--text", "hi"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("lstm.fwd"), std::string::npos) << r.err;
}

TEST_F(CliTest, PredictRanksAllAuthors) {
  prepare_corpus();
  ASSERT_EQ(train_model().code, 0);
  const auto docs = load_jsonl(path("data.jsonl"));
  const auto r = run({"predict", "--checkpoint", path("model.json").string(), "--text",
                      docs.front().text});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string author;
  double p, total = 0, previous = 2.0;
  int n = 0;
  while (lines >> author >> p) {
    EXPECT_LE(p, previous);
    previous = p;
    total += p;
    ++n;
  }
  EXPECT_EQ(n, 3);
  EXPECT_NEAR(total, 1.0, 1e-9);
  EXPECT_EQ(run({"predict", "--checkpoint", path("model.json").string(), "--text",
                 docs.front().text})
                .out,
            r.out);

  const auto unseen = run({"predict", "--checkpoint", path("model.json").string(), "--text",
                           "\xE2\x98\x83\xE2\x98\x83 \xF0\x9F\x8E\xBB"});
  EXPECT_EQ(unseen.code, 0) << unseen.err;
  EXPECT_EQ(run({"predict", "--checkpoint", path("model.json").string(), "--text", "  "}).code,
            2);
}

TEST_F(CliTest, StatsRow) {
  const auto r = run({"stats", "--dataset", (kData / "five_authors.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "n,w,c,t\n5,5.8,29.1,10\n");
}

TEST_F(CliTest, ConfigFileThenOverridesThenFlags) {
  std::ofstream(path("run.json")) << R"({"model": {"embed_dim": 5},
                                        "train": {"seed": 1, "epochs": 3},
                                        "paths": {"dataset": "/nowhere.jsonl"},
                                        "bpe_merges": 4})";
  auto config = RunConfig::from_file(path("run.json"));
  EXPECT_EQ(config.model.embed_dim, 5u);
  EXPECT_EQ(config.bpe_merges, 4u);
  config.apply_override("train.epochs=7");
  config.apply_override("model.combine=concat");
  config.apply_override("paths.metrics=123");
  EXPECT_EQ(config.train.epochs, 7u);
  EXPECT_EQ(config.train.seed, 1u);
  EXPECT_EQ(config.model.combine, Combine::kConcat);
  EXPECT_EQ(config.paths.metrics, "123");
  EXPECT_THROW(config.apply_override("epochs"), UsageError);
  EXPECT_THROW(config.apply_override("train.epoch=3"), UsageError);
  EXPECT_THROW(config.apply_override("train.epochs=-1"), ConfigError);
  EXPECT_EQ(RunConfig::from_json(config.to_json()).to_json(), config.to_json());

  // The --dataset flag wins over the config file's path.
  const auto r = run({"stats", "--config", path("run.json").string(), "--dataset",
                      (kData / "five_authors.jsonl").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(run({"stats", "--config", path("run.json").string()}).code, 2);
  EXPECT_EQ(run({"stats", "--config", path("missing.json").string()}).code, 2);
}

}  // namespace
}  // namespace stylo::cli
