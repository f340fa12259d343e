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
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace stylo {

class BpeModel;

struct LabeledDocument {
  std::string author;
  std::string text;

  friend bool operator==(const LabeledDocument&, const LabeledDocument&) = default;
  friend auto operator<=>(const LabeledDocument&, const LabeledDocument&) = default;
};

struct DatasetSplit {
  std::vector<LabeledDocument> train;
  std::vector<LabeledDocument> validation;
  std::vector<LabeledDocument> test;
  std::uint64_t seed = 0;
};

// One row of a dataset statistics table.
struct CorpusStats {
  std::size_t n_authors = 0;
  double mean_tokens_per_doc = 0.0;
  double mean_chars_per_doc = 0.0;
  std::size_t n_documents = 0;
};

struct SplitRatios {
  double train = 0.60;
  double validation = 0.20;
  double test = 0.20;
};

struct Fold {
  std::vector<LabeledDocument> train;
  std::vector<LabeledDocument> holdout;
};

inline constexpr std::size_t kDefaultFolds = 5;

// Reads line-delimited JSON records carrying string fields "author" and
// "text". Blank lines are skipped; unknown fields are ignored. Throws
// ParseError naming the 1-based line on malformed records and CorpusError
// when no records are present.
std::vector<LabeledDocument> load_jsonl(const std::filesystem::path& path);

// Writes documents in the format load_jsonl reads.
void save_jsonl(const std::filesystem::path& path,
                std::span<const LabeledDocument> docs);

// Throws CorpusError when a document violates the LabeledDocument invariants
// (blank text or empty author).
void validate_document(const LabeledDocument& doc);

// Counts tokens with `tokenizer` when given, whitespace-separated words
// otherwise. Characters are Unicode code points of the raw text.
CorpusStats corpus_stats(std::span<const LabeledDocument> docs,
                         const BpeModel* tokenizer = nullptr);

// Sorted, de-duplicated author labels.
std::vector<std::string> author_labels(std::span<const LabeledDocument> docs);

// Documents grouped by author, preserving input order within each group.
std::map<std::string, std::vector<LabeledDocument>> group_by_author(
    std::span<const LabeledDocument> docs);

// Per-author stratified split. Each author's documents are shuffled once with
// a seed derived from (seed, author), then sliced with floor counts; the
// leftover documents go to train, then validation, then test.
DatasetSplit split_stratified(std::span<const LabeledDocument> docs,
                              SplitRatios ratios, std::uint64_t seed);

// Per-author bucket sizes produced by split_stratified for `count` documents.
struct SplitCounts {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};
SplitCounts stratified_counts(std::size_t count, SplitRatios ratios);

// Stratified k-fold partition. Each author's shuffled documents are dealt
// round-robin into k holdout folds; fold i trains on everything else.
std::vector<Fold> kfold_partitions(std::span<const LabeledDocument> docs,
                                   std::size_t k, std::uint64_t seed);

}  // namespace stylo
