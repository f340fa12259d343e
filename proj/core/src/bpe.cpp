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

#include "stylo/bpe.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_set>

#include "stylo/error.hpp"
#include "stylo/utf8.hpp"

namespace stylo {
namespace {

using Symbols = std::vector<std::int32_t>;

std::uint64_t pack(std::int32_t left, std::int32_t right) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(left)) << 32) |
         static_cast<std::uint32_t>(right);
}

std::int32_t unpack_left(std::uint64_t key) {
  return static_cast<std::int32_t>(key >> 32);
}
std::int32_t unpack_right(std::uint64_t key) {
  return static_cast<std::int32_t>(key & 0xffffffffULL);
}

// Replaces every non-overlapping (left, right), scanning left to right.
void apply_rule(Symbols& symbols, std::int32_t left, std::int32_t right,
                std::int32_t result) {
  if (symbols.size() < 2) return;
  std::size_t out = 0;
  std::size_t i = 0;
  while (i < symbols.size()) {
    if (i + 1 < symbols.size() && symbols[i] == left && symbols[i + 1] == right) {
      symbols[out++] = result;
      i += 2;
    } else {
      symbols[out++] = symbols[i++];
    }
  }
  symbols.resize(out);
}

bool is_single_code_point(std::string_view s) {
  return !s.empty() && utf8::code_point_count(s) == 1;
}

// Bookkeeping for training: interned symbols, unique words with their
// frequencies in first-occurrence order, and incremental pair counts.
class MergeTrainer {
 public:
  explicit MergeTrainer(std::span<const LabeledDocument> docs) {
    std::unordered_map<std::string, std::size_t> word_index;
    for (const auto& doc : docs) {
      for (auto& word : utf8::words(doc.text)) {
        auto [it, inserted] = word_index.try_emplace(word, words_.size());
        if (inserted) {
          Symbols symbols;
          for (const auto& cp : utf8::code_points(word)) {
            symbols.push_back(intern(cp));
          }
          words_.push_back({std::move(symbols), 0});
        }
        ++words_[it->second].count;
      }
    }
    base_symbols_ = symbol_text_.size();
    for (std::size_t w = 0; w < words_.size(); ++w) add_pairs(w);
  }

  std::vector<std::string> alphabet() const {
    return {symbol_text_.begin(),
            symbol_text_.begin() + static_cast<std::ptrdiff_t>(base_symbols_)};
  }

  // Runs one merge round. Returns false when nothing is left to merge.
  bool step(std::vector<std::pair<std::string, std::string>>& rules) {
    std::int64_t best = 0;
    std::vector<std::uint64_t> candidates;
    for (const auto& [key, count] : counts_) {
      if (count <= 0 || used_.contains(key)) continue;
      if (count > best) {
        best = count;
        candidates.assign(1, key);
      } else if (count == best) {
        candidates.push_back(key);
      }
    }
    if (candidates.empty()) return false;

    const std::uint64_t chosen =
        candidates.size() == 1 ? candidates.front() : first_occurring(candidates);
    const std::int32_t left = unpack_left(chosen);
    const std::int32_t right = unpack_right(chosen);
    const std::string merged = symbol_text_[left] + symbol_text_[right];
    rules.emplace_back(symbol_text_[left], symbol_text_[right]);
    used_.insert(chosen);
    const std::int32_t result = intern(merged);

    auto affected = std::move(where_[chosen]);
    where_.erase(chosen);
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
    for (std::size_t w : affected) {
      if (!contains_pair(words_[w].symbols, left, right)) continue;
      remove_pairs(w);
      apply_rule(words_[w].symbols, left, right, result);
      add_pairs(w);
    }
    return true;
  }

 private:
  struct WordType {
    Symbols symbols;
    std::int64_t count;
  };

  std::int32_t intern(const std::string& text) {
    auto [it, inserted] =
        symbol_ids_.try_emplace(text, static_cast<std::int32_t>(symbol_text_.size()));
    if (inserted) symbol_text_.push_back(text);
    return it->second;
  }

  static bool contains_pair(const Symbols& s, std::int32_t left, std::int32_t right) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (s[i] == left && s[i + 1] == right) return true;
    }
    return false;
  }

  void add_pairs(std::size_t w) {
    const auto& s = words_[w].symbols;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const auto key = pack(s[i], s[i + 1]);
      counts_[key] += words_[w].count;
      where_[key].push_back(w);
    }
  }

  void remove_pairs(std::size_t w) {
    const auto& s = words_[w].symbols;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const auto key = pack(s[i], s[i + 1]);
      auto it = counts_.find(key);
      it->second -= words_[w].count;
      if (it->second == 0) counts_.erase(it);
    }
  }

  // The first occurrence of a pair in a scan of the full corpus falls inside
  // the first occurrence of some word type, so scanning word types in
  // first-occurrence order finds it.
  std::uint64_t first_occurring(const std::vector<std::uint64_t>& candidates) const {
    const std::unordered_set<std::uint64_t> wanted(candidates.begin(), candidates.end());
    for (const auto& word : words_) {
      const auto& s = word.symbols;
      for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const auto key = pack(s[i], s[i + 1]);
        if (wanted.contains(key)) return key;
      }
    }
    return candidates.front();  // unreachable: every counted pair occurs somewhere
  }

  std::vector<std::string> symbol_text_;
  std::unordered_map<std::string, std::int32_t> symbol_ids_;
  std::size_t base_symbols_ = 0;
  std::vector<WordType> words_;
  std::unordered_map<std::uint64_t, std::int64_t> counts_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> where_;
  std::unordered_set<std::uint64_t> used_;
};

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

}  // namespace

BpeModel BpeModel::from_rules(
    std::vector<std::string> alphabet,
    const std::vector<std::pair<std::string, std::string>>& rules) {
  BpeModel model;
  for (const auto& ch : alphabet) {
    if (!is_single_code_point(ch) || utf8::is_blank(ch)) {
      throw ConfigError("alphabet entry '" + ch +
                        "' is not a single non-whitespace character");
    }
  }
  // UTF-8 byte order is code point order.
  std::sort(alphabet.begin(), alphabet.end());
  if (std::adjacent_find(alphabet.begin(), alphabet.end()) != alphabet.end()) {
    throw ConfigError("alphabet contains a repeated character");
  }

  model.alphabet_ = std::move(alphabet);
  model.tokens_ = {std::string(), std::string(kUnkToken)};
  for (const auto& ch : model.alphabet_) {
    model.ids_.emplace(ch, static_cast<TokenId>(model.tokens_.size()));
    model.tokens_.push_back(ch);
  }

  for (std::size_t rank = 0; rank < rules.size(); ++rank) {
    const auto& [left, right] = rules[rank];
    const auto l = model.ids_.find(left);
    const auto r = model.ids_.find(right);
    if (l == model.ids_.end() || r == model.ids_.end()) {
      throw ConfigError("merge " + std::to_string(rank) + " (" + left + ", " + right +
                        ") uses a token that is neither a base character nor an "
                        "earlier merge result");
    }
    const auto key = pack(l->second, r->second);
    if (model.rule_by_pair_.contains(key)) {
      throw ConfigError("duplicate merge rule (" + left + ", " + right + ")");
    }
    std::string result = left + right;
    const auto id = static_cast<TokenId>(model.tokens_.size());
    model.tokens_.push_back(result);
    const TokenId canonical = model.ids_.try_emplace(result, id).first->second;
    model.rule_by_pair_.emplace(key, RuleRef{rank, canonical});
    model.merges_.push_back({left, right, std::move(result), rank});
  }
  return model;
}

TokenId BpeModel::id_of(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnkId : it->second;
}

bool BpeModel::contains(std::string_view token) const {
  return ids_.contains(std::string(token));
}

const std::string& BpeModel::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw Error("token id " + std::to_string(id) + " outside vocabulary of size " +
                std::to_string(tokens_.size()));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<TokenId> BpeModel::encode_word(std::string_view word) const {
  std::vector<TokenId> symbols;
  for (const auto& cp : utf8::code_points(word)) symbols.push_back(id_of(cp));

  // Replays the merge order: each round applies the lowest-ranked rule that
  // is present and comes after the previously applied one. Rules that only
  // become applicable after their turn are skipped, as they were in training.
  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  std::size_t last = kNone;
  while (symbols.size() > 1) {
    const RuleRef* next = nullptr;
    TokenId left = 0;
    TokenId right = 0;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      auto it = rule_by_pair_.find(pack(symbols[i], symbols[i + 1]));
      if (it == rule_by_pair_.end()) continue;
      const RuleRef& rule = it->second;
      if (last != kNone && rule.rank <= last) continue;
      if (next == nullptr || rule.rank < next->rank) {
        next = &rule;
        left = symbols[i];
        right = symbols[i + 1];
      }
    }
    if (next == nullptr) break;
    apply_rule(symbols, left, right, next->result);
    last = next->rank;
  }
  return symbols;
}

std::vector<TokenId> BpeModel::encode(std::string_view text) const {
  std::vector<TokenId> ids;
  for (const auto& word : utf8::words(text)) {
    const auto piece = encode_word(word);
    ids.insert(ids.end(), piece.begin(), piece.end());
  }
  return ids;
}

std::vector<std::string> BpeModel::decode(std::span<const TokenId> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (TokenId id : ids) out.push_back(token(id));
  return out;
}

BpeModel train_bpe(std::span<const LabeledDocument> docs, std::size_t n_merges) {
  if (docs.empty()) throw CorpusError("cannot train BPE on an empty corpus");
  MergeTrainer trainer(docs);
  std::vector<std::pair<std::string, std::string>> rules;
  while (rules.size() < n_merges && trainer.step(rules)) {
  }
  return BpeModel::from_rules(trainer.alphabet(), rules);
}

std::string merges_to_string(const BpeModel& model) {
  std::string out(kMergesHeader);
  out += '\n';
  out += kAlphabetPrefix;
  for (const auto& ch : model.alphabet()) out += ch;
  out += '\n';
  for (const auto& rule : model.merges()) {
    out += rule.left;
    out += '\t';
    out += rule.right;
    out += '\n';
  }
  return out;
}

BpeModel merges_from_string(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front() != kMergesHeader) {
    throw ParseError("expected header '" + std::string(kMergesHeader) + "'", 1);
  }

  std::size_t first_rule = 1;
  std::vector<std::string> alphabet;
  bool explicit_alphabet = false;
  if (lines.size() > 1 && lines[1].starts_with(kAlphabetPrefix)) {
    explicit_alphabet = true;
    alphabet = utf8::code_points(lines[1].substr(kAlphabetPrefix.size()));
    first_rule = 2;
  }

  std::set<std::string> known(alphabet.begin(), alphabet.end());
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<std::pair<std::string, std::string>> rules;
  std::set<std::string> used_chars;
  for (std::size_t i = first_rule; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string_view line = lines[i];
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos) {
      throw ParseError("expected 'left<TAB>right'", line_no);
    }
    std::string left(line.substr(0, tab));
    std::string right(line.substr(tab + 1));
    if (left.empty() || right.empty()) throw ParseError("empty merge operand", line_no);
    if (!seen.emplace(left, right).second) {
      throw ParseError("duplicate merge rule (" + left + ", " + right + ")", line_no);
    }
    for (const std::string* operand : {&left, &right}) {
      if (is_single_code_point(*operand)) {
        if (utf8::is_blank(*operand)) throw ParseError("whitespace operand", line_no);
        if (explicit_alphabet && !known.contains(*operand)) {
          throw ParseError("character '" + *operand + "' missing from alphabet", line_no);
        }
        used_chars.insert(*operand);
      } else if (!known.contains(*operand)) {
        throw ParseError("operand '" + *operand + "' is not an earlier merge result",
                         line_no);
      }
    }
    known.insert(left + right);
    rules.emplace_back(std::move(left), std::move(right));
  }
  if (!explicit_alphabet) alphabet.assign(used_chars.begin(), used_chars.end());

  try {
    return BpeModel::from_rules(std::move(alphabet), rules);
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), 0);
  }
}

void save_merges(const BpeModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write merges file: " + path.string());
  out << merges_to_string(model);
  if (!out) throw Error("failed writing merges file: " + path.string());
}

BpeModel load_merges(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open merges file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return merges_from_string(buffer.str());
}

}  // namespace stylo
