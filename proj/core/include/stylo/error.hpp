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
#include <stdexcept>
#include <string>

namespace stylo {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. `line` is 1-based; 0 when the error is not tied to a
// specific line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Corpus-level precondition failures: empty corpus, too few documents per
// author for the requested split, unknown author labels.
class CorpusError : public Error {
 public:
  using Error::Error;
};

// Tensor shape mismatch or checkpoint/config disagreement.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A configuration value violates its invariant.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// NaN or infinity reached somewhere it must not.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace stylo
