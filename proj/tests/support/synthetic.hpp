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
#include <vector>

#include "stylo/corpus.hpp"

namespace stylo::testing {

struct SyntheticCorpusSpec {
  std::size_t authors = 5;
  std::size_t docs_per_author = 60;
  std::size_t vocabulary_per_author = 30;
  double shared_fraction = 0.2;  // of each author's vocabulary
  std::size_t min_words = 30;
  std::size_t max_words = 60;
  std::uint64_t seed = 2024;
};

// Each author writes documents by drawing words uniformly from a private
// vocabulary; a shared_fraction slice of every vocabulary is one pool common
// to all authors. Words are random lowercase strings, unique corpus-wide.
std::vector<LabeledDocument> make_synthetic_corpus(const SyntheticCorpusSpec& spec = {});

// Same documents with author labels permuted at random (label noise baseline).
std::vector<LabeledDocument> shuffle_labels(std::vector<LabeledDocument> docs,
                                            std::uint64_t seed);

}  // namespace stylo::testing
