// Copyright 2026 The kgnews Authors.
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

#ifndef KGNEWS_TOKENIZER_HPP_
#define KGNEWS_TOKENIZER_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kgnews {

// Shared text normalization. Titles, aliases and bias phrases all go through
// the same rules so that matching never depends on where a string came from:
// split on Unicode whitespace, strip leading and trailing punctuation from
// every token, drop tokens that become empty. Case folding covers ASCII only.
std::vector<std::string> TokenizePreservingCase(std::string_view text);
std::vector<std::string> Tokenize(std::string_view text);

// Lowercased tokens joined by single spaces.
std::string NormalizePhrase(std::string_view text);

std::string AsciiLower(std::string_view text);
std::string Join(std::span<const std::string> tokens, std::size_t begin, std::size_t end);

// Splits on Unicode whitespace only, keeping punctuation attached.
std::vector<std::string> SplitWhitespace(std::string_view text);

}  // namespace kgnews

#endif  // KGNEWS_TOKENIZER_HPP_
