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

#include "stylo/corpus.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include <json.hpp>

#include "stylo/bpe.hpp"
#include "stylo/error.hpp"
#include "stylo/rng.hpp"
#include "stylo/utf8.hpp"

namespace stylo {
namespace {

using nlohmann::json;

// FNV-1a; std::hash is not stable across implementations.
std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<LabeledDocument> shuffled_bucket(std::vector<LabeledDocument> bucket,
                                             std::uint64_t seed,
                                             const std::string& author) {
  Rng rng(Rng::derive(seed, fnv1a(author)));
  rng.shuffle(std::span(bucket));
  return bucket;
}

}  // namespace

std::vector<LabeledDocument> load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset file: " + path.string());

  std::vector<LabeledDocument> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (utf8::is_blank(line)) continue;

    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!record.is_object()) throw ParseError("record is not an object", line_no);
    for (const char* field : {"author", "text"}) {
      auto it = record.find(field);
      if (it == record.end()) {
        throw ParseError(std::string("missing \"") + field + "\" field", line_no);
      }
      if (!it->is_string()) {
        throw ParseError(std::string("\"") + field + "\" is not a string", line_no);
      }
    }
    LabeledDocument doc{record["author"].get<std::string>(),
                        record["text"].get<std::string>()};
    try {
      validate_document(doc);
    } catch (const CorpusError& e) {
      throw ParseError(e.what(), line_no);
    }
    docs.push_back(std::move(doc));
  }
  if (docs.empty()) throw CorpusError("empty corpus: " + path.string());
  return docs;
}

void save_jsonl(const std::filesystem::path& path,
                std::span<const LabeledDocument> docs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write dataset file: " + path.string());
  for (const auto& doc : docs) {
    out << json{{"author", doc.author}, {"text", doc.text}}.dump() << '\n';
  }
}

void validate_document(const LabeledDocument& doc) {
  if (doc.author.empty()) throw CorpusError("document has an empty author");
  if (utf8::is_blank(doc.text)) {
    throw CorpusError("document by '" + doc.author + "' has blank text");
  }
}

CorpusStats corpus_stats(std::span<const LabeledDocument> docs,
                         const BpeModel* tokenizer) {
  if (docs.empty()) throw CorpusError("empty corpus");
  std::set<std::string_view> authors;
  double tokens = 0.0;
  double chars = 0.0;
  for (const auto& doc : docs) {
    authors.insert(doc.author);
    tokens += static_cast<double>(tokenizer ? tokenizer->encode(doc.text).size()
                                            : utf8::words(doc.text).size());
    chars += static_cast<double>(utf8::code_point_count(doc.text));
  }
  const auto n = static_cast<double>(docs.size());
  return CorpusStats{authors.size(), tokens / n, chars / n, docs.size()};
}

std::vector<std::string> author_labels(std::span<const LabeledDocument> docs) {
  std::set<std::string> labels;
  for (const auto& doc : docs) labels.insert(doc.author);
  return {labels.begin(), labels.end()};
}

std::map<std::string, std::vector<LabeledDocument>> group_by_author(
    std::span<const LabeledDocument> docs) {
  std::map<std::string, std::vector<LabeledDocument>> groups;
  for (const auto& doc : docs) groups[doc.author].push_back(doc);
  return groups;
}

SplitCounts stratified_counts(std::size_t count, SplitRatios ratios) {
  // The epsilon absorbs representation error such as 0.6 * 10 = 5.999...
  auto floor_of = [count](double r) {
    return static_cast<std::size_t>(std::floor(r * static_cast<double>(count) + 1e-9));
  };
  SplitCounts c{floor_of(ratios.train), floor_of(ratios.validation),
                floor_of(ratios.test)};
  std::size_t assigned = c.train + c.validation + c.test;
  std::size_t* order[] = {&c.train, &c.validation, &c.test};
  for (std::size_t i = 0; assigned < count; ++i, ++assigned) ++*order[i % 3];
  return c;
}

DatasetSplit split_stratified(std::span<const LabeledDocument> docs,
                              SplitRatios ratios, std::uint64_t seed) {
  if (docs.empty()) throw CorpusError("empty corpus");
  for (double r : {ratios.train, ratios.validation, ratios.test}) {
    if (!(r >= 0.0)) throw ConfigError("split ratios must be non-negative");
  }
  if (std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9) {
    throw ConfigError("split ratios must sum to 1");
  }

  DatasetSplit split;
  split.seed = seed;
  for (auto& [author, bucket] : group_by_author(docs)) {
    if (bucket.size() < 3) {
      throw CorpusError("cannot stratify: author '" + author + "' has " +
                        std::to_string(bucket.size()) +
                        " document(s), at least 3 required");
    }
    auto shuffled = shuffled_bucket(std::move(bucket), seed, author);
    const SplitCounts counts = stratified_counts(shuffled.size(), ratios);
    auto it = shuffled.begin();
    auto take = [&it](std::vector<LabeledDocument>& dst, std::size_t n) {
      dst.insert(dst.end(), std::make_move_iterator(it),
                 std::make_move_iterator(it + static_cast<std::ptrdiff_t>(n)));
      it += static_cast<std::ptrdiff_t>(n);
    };
    take(split.train, counts.train);
    take(split.validation, counts.validation);
    take(split.test, counts.test);
  }
  return split;
}

std::vector<Fold> kfold_partitions(std::span<const LabeledDocument> docs,
                                   std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("k-fold requires k >= 2");
  if (docs.empty()) throw CorpusError("empty corpus");

  std::vector<Fold> folds(k);
  for (auto& [author, bucket] : group_by_author(docs)) {
    if (bucket.size() < k) {
      throw CorpusError("cannot build " + std::to_string(k) + " folds: author '" +
                        author + "' has only " + std::to_string(bucket.size()) +
                        " document(s)");
    }
    auto shuffled = shuffled_bucket(std::move(bucket), seed, author);
    for (std::size_t j = 0; j < shuffled.size(); ++j) {
      const std::size_t holdout = j % k;
      for (std::size_t f = 0; f < k; ++f) {
        (f == holdout ? folds[f].holdout : folds[f].train).push_back(shuffled[j]);
      }
    }
  }
  return folds;
}

}  // namespace stylo
