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

#include "stylo/utf8.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "stylo/error.hpp"

namespace stylo::utf8 {
namespace {

// Calls fn(code_point, begin, end) for every code point of `text`.
template <typename Fn>
void for_each_code_point(std::string_view text, Fn&& fn) {
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t begin = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    fn(c, static_cast<std::size_t>(begin), static_cast<std::size_t>(i));
  }
}

}  // namespace

std::string nfc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw Error(std::string("ICU NFC normalizer unavailable: ") +
                u_errorName(status));
  }
  const auto input = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  const icu::UnicodeString normalized = normalizer->normalize(input, status);
  if (U_FAILURE(status)) {
    throw Error(std::string("NFC normalization failed: ") + u_errorName(status));
  }
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::vector<std::string> code_points(std::string_view text) {
  std::vector<std::string> out;
  for_each_code_point(text, [&](UChar32, std::size_t b, std::size_t e) {
    out.emplace_back(text.substr(b, e - b));
  });
  return out;
}

std::size_t code_point_count(std::string_view text) {
  std::size_t n = 0;
  for_each_code_point(text, [&](UChar32, std::size_t, std::size_t) { ++n; });
  return n;
}

std::vector<std::string> words(std::string_view text) {
  const std::string normalized = nfc(text);
  std::vector<std::string> out;
  std::string current;
  for_each_code_point(normalized, [&](UChar32 c, std::size_t b, std::size_t e) {
    if (c >= 0 && u_isUWhiteSpace(c)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.append(normalized, b, e - b);
    }
  });
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

bool is_blank(std::string_view text) {
  bool blank = true;
  for_each_code_point(text, [&](UChar32 c, std::size_t, std::size_t) {
    if (c < 0 || !u_isUWhiteSpace(c)) blank = false;
  });
  return blank;
}

}  // namespace stylo::utf8
