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

#include "kgnews/tokenizer.hpp"

#include <cstdint>

namespace kgnews {
namespace {

// Length in bytes of the whitespace sequence starting at s[i], or 0.
std::size_t WhitespaceAt(std::string_view s, std::size_t i) {
  auto b = [&](std::size_t k) -> unsigned { return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) : 0u; };
  unsigned c0 = b(0);
  if (c0 == ' ' || (c0 >= 0x09 && c0 <= 0x0d)) return 1;
  if (c0 == 0xc2 && (b(1) == 0x85 || b(1) == 0xa0)) return 2;
  if (c0 == 0xe1 && b(1) == 0x9a && b(2) == 0x80) return 3;  // U+1680
  if (c0 == 0xe2 && b(1) == 0x80) {
    unsigned c2 = b(2);
    if ((c2 >= 0x80 && c2 <= 0x8a) || c2 == 0xa8 || c2 == 0xa9 || c2 == 0xaf) return 3;
  }
  if (c0 == 0xe2 && b(1) == 0x81 && b(2) == 0x9f) return 3;  // U+205F
  if (c0 == 0xe3 && b(1) == 0x80 && b(2) == 0x80) return 3;  // U+3000
  return 0;
}

bool IsAsciiPunct(unsigned char c) {
  return (c >= 0x21 && c <= 0x2f) || (c >= 0x3a && c <= 0x40) || (c >= 0x5b && c <= 0x60) ||
         (c >= 0x7b && c <= 0x7e);
}

// U+2010..U+2027 and U+2030..U+205E: dashes, curly quotes, ellipsis, etc.
bool IsGeneralPunct(std::string_view s, std::size_t i) {
  if (i + 3 > s.size()) return false;
  unsigned c0 = static_cast<unsigned char>(s[i]);
  unsigned c1 = static_cast<unsigned char>(s[i + 1]);
  unsigned c2 = static_cast<unsigned char>(s[i + 2]);
  if (c0 != 0xe2) return false;
  std::uint32_t cp = ((c0 & 0x0f) << 12) | ((c1 & 0x3f) << 6) | (c2 & 0x3f);
  return (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205e);
}

std::string_view StripPunct(std::string_view t) {
  for (;;) {
    if (!t.empty() && IsAsciiPunct(static_cast<unsigned char>(t.front()))) {
      t.remove_prefix(1);
    } else if (IsGeneralPunct(t, 0)) {
      t.remove_prefix(3);
    } else {
      break;
    }
  }
  for (;;) {
    if (!t.empty() && IsAsciiPunct(static_cast<unsigned char>(t.back()))) {
      t.remove_suffix(1);
    } else if (t.size() >= 3 && IsGeneralPunct(t, t.size() - 3)) {
      t.remove_suffix(3);
    } else {
      break;
    }
  }
  return t;
}

}  // namespace

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  std::size_t start = 0;
  bool in_word = false;
  while (i < text.size()) {
    std::size_t ws = WhitespaceAt(text, i);
    if (ws > 0) {
      if (in_word) words.emplace_back(text.substr(start, i - start));
      in_word = false;
      i += ws;
    } else {
      if (!in_word) start = i;
      in_word = true;
      ++i;
    }
  }
  if (in_word) words.emplace_back(text.substr(start));
  return words;
}

std::vector<std::string> TokenizePreservingCase(std::string_view text) {
  std::vector<std::string> tokens;
  for (const std::string &word : SplitWhitespace(text)) {
    std::string_view stripped = StripPunct(word);
    if (!stripped.empty()) tokens.emplace_back(stripped);
  }
  return tokens;
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens = TokenizePreservingCase(text);
  for (std::string &t : tokens) t = AsciiLower(t);
  return tokens;
}

std::string NormalizePhrase(std::string_view text) {
  std::vector<std::string> tokens = Tokenize(text);
  return Join(tokens, 0, tokens.size());
}

std::string AsciiLower(std::string_view text) {
  std::string out(text);
  for (char &c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string Join(std::span<const std::string> tokens, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

}  // namespace kgnews
