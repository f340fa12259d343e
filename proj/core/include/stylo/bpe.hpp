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
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stylo/corpus.hpp"

namespace stylo {

using TokenId = std::int32_t;

// One learned replacement (left, right) -> left + right. `rank` is the
// 0-based position in the merge order.
struct MergeRule {
  std::string left;
  std::string right;
  std::string result;
  std::size_t rank = 0;

  friend bool operator==(const MergeRule&, const MergeRule&) = default;
};

// Subword vocabulary: reserved ids, the base alphabet of single code points,
// and one id per merge rule, in that order.
//
//   id 0                     padding, decodes to ""
//   id 1                     unknown character, decodes to kUnkToken
//   2 .. 2+|alphabet|        base characters, sorted by code point
//   then one id per merge    in rank order
//
// Two different merges can spell the same string (ab+c and a+bc). Each merge
// keeps its own id so |vocab| = |alphabet| + |merges| + 2 always holds;
// lookups by string return the first id.
class BpeModel {
 public:
  static constexpr TokenId kPadId = 0;
  static constexpr TokenId kUnkId = 1;
  static constexpr std::string_view kUnkToken = "⟨unk⟩";

  BpeModel() = default;

  // Builds a model and checks its invariants: alphabet entries are single
  // distinct non-whitespace code points, every rule operand is a base
  // character or an earlier result, and no (left, right) pair repeats.
  // Throws ConfigError on violation.
  static BpeModel from_rules(std::vector<std::string> alphabet,
                             const std::vector<std::pair<std::string, std::string>>& rules);

  const std::vector<MergeRule>& merges() const noexcept { return merges_; }
  const std::vector<std::string>& alphabet() const noexcept { return alphabet_; }
  std::size_t vocab_size() const noexcept { return tokens_.size(); }
  TokenId pad_id() const noexcept { return kPadId; }
  TokenId unk_id() const noexcept { return kUnkId; }

  // Id of a base character or merge result; kUnkId when absent.
  TokenId id_of(std::string_view token) const;
  bool contains(std::string_view token) const;

  // Token string for an id. Throws Error for ids outside [0, vocab_size).
  const std::string& token(TokenId id) const;

  // Segments a single whitespace-free word (already NFC) into token ids.
  std::vector<TokenId> encode_word(std::string_view word) const;

  // NFC-normalizes, splits on whitespace and segments every word. Characters
  // outside the alphabet become kUnkId. Whitespace produces no tokens.
  std::vector<TokenId> encode(std::string_view text) const;

  std::vector<std::string> decode(std::span<const TokenId> ids) const;

 private:
  struct PairHash {
    std::size_t operator()(std::uint64_t key) const noexcept {
      return static_cast<std::size_t>(key ^ (key >> 29));
    }
  };
  struct RuleRef {
    std::size_t rank;
    TokenId result;
  };

  std::vector<std::string> alphabet_;
  std::vector<MergeRule> merges_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
  std::unordered_map<std::uint64_t, RuleRef, PairHash> rule_by_pair_;
};

// Learns up to `n_merges` rules. Each round counts adjacent symbol pairs over
// the corpus (word-internal only, weighted by word frequency), picks the most
// frequent pair not already a rule, breaking ties by the earliest first
// occurrence in a left-to-right scan of the documents, and replaces every
// non-overlapping occurrence left to right. Stops early when no pair remains.
// Throws CorpusError on an empty corpus.
BpeModel train_bpe(std::span<const LabeledDocument> docs, std::size_t n_merges);

inline constexpr std::string_view kMergesHeader = "#bpe-merges v1";
inline constexpr std::string_view kAlphabetPrefix = "#alphabet\t";

// Merges file text:
//   #bpe-merges v1
//   #alphabet<TAB><all base characters concatenated>   (optional on load)
//   left<TAB>right                                      (one line per rule)
// Without an alphabet line the alphabet is every character used by a rule.
std::string merges_to_string(const BpeModel& model);
BpeModel merges_from_string(std::string_view text);

void save_merges(const BpeModel& model, const std::filesystem::path& path);
BpeModel load_merges(const std::filesystem::path& path);

}  // namespace stylo
