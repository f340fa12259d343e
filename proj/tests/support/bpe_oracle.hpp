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

#include <string>
#include <utility>
#include <vector>

namespace stylo::testing {

// Reference BPE trainer for small inputs. Every round rescans the whole
// corpus (word by word, in order) from scratch, counts every adjacent pair,
// and picks the highest count, preferring the pair seen first in the scan.
// Pairs that already have a rule are skipped. Shares no code with the
// library trainer.
std::vector<std::pair<std::string, std::string>> brute_force_bpe(
    const std::vector<std::string>& texts, std::size_t n_merges);

// The corpus segmentation the reference trainer ends with, one vector of
// tokens per word in corpus order.
std::vector<std::vector<std::string>> brute_force_segmentation(
    const std::vector<std::string>& texts, std::size_t n_merges);

}  // namespace stylo::testing
