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

#ifndef KGNEWS_VOCABULARY_HPP_
#define KGNEWS_VOCABULARY_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgnews {

inline constexpr std::size_t kDefaultVocabCap = 10000;
inline constexpr std::size_t kMaxSequenceLength = 256;

// Token ids with 0 = padding and 1 = unknown. The cap counts both reserved
// ids, so a cap of 10000 holds 9998 real tokens.
class Vocabulary {
 public:
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kUnk = 1;
  static constexpr std::size_t kReserved = 2;

  Vocabulary() = default;

  // Most frequent tokens first, ties broken by first appearance.
  static Vocabulary Build(const std::vector<std::vector<std::string>> &corpus, std::size_t cap = kDefaultVocabCap);

  std::int32_t id(std::string_view token) const;
  const std::string &token(std::int32_t id) const;
  std::size_t size() const { return kReserved + tokens_.size(); }

  // One token per line; line number = id - 2.
  std::string Serialize() const;
  void Save(const std::string &path) const;
  static Vocabulary Load(const std::string &path);

 private:
  void Add(std::string token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> ids_;
};

struct TokenSequence {
  std::vector<std::int32_t> ids;
  std::vector<std::uint8_t> mask;  // 1 = real token

  std::size_t length() const { return ids.size(); }
  std::size_t real_tokens() const;
  void pad_to(std::size_t n);
};

// Maps tokens to ids and truncates to max_len.
TokenSequence EncodeIds(const std::vector<std::string> &tokens, const Vocabulary &vocab,
                        std::size_t max_len = kMaxSequenceLength);

}  // namespace kgnews

#endif  // KGNEWS_VOCABULARY_HPP_
