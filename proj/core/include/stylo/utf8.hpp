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
#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers backed by ICU.
namespace stylo::utf8 {

// NFC-normalizes `text`. Invalid byte sequences become U+FFFD.
std::string nfc(std::string_view text);

// Splits into one string per code point.
std::vector<std::string> code_points(std::string_view text);

std::size_t code_point_count(std::string_view text);

// NFC-normalizes, then splits on Unicode whitespace. Empty pieces dropped.
std::vector<std::string> words(std::string_view text);

// True when `text` contains nothing but Unicode whitespace.
bool is_blank(std::string_view text);

}  // namespace stylo::utf8
