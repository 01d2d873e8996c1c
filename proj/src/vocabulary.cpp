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

#include "kgnews/vocabulary.hpp"

#include <algorithm>
#include <fstream>

#include "kgnews/binary_io.hpp"
#include "kgnews/error.hpp"

namespace kgnews {

Vocabulary Vocabulary::Build(const std::vector<std::vector<std::string>> &corpus, std::size_t cap) {
  if (corpus.empty()) Fail(ErrorKind::kInvalidArgument, "cannot build a vocabulary from an empty corpus");
  if (cap < kReserved) Fail(ErrorKind::kInvalidArgument, "vocabulary cap must cover the two reserved ids");
  struct Entry {
    std::size_t count = 0;
    std::size_t first = 0;
  };
  std::unordered_map<std::string, Entry> counts;
  std::vector<std::string> order;
  for (const auto &doc : corpus) {
    for (const auto &tok : doc) {
      auto [it, inserted] = counts.try_emplace(tok);
      if (inserted) {
        it->second.first = order.size();
        order.push_back(tok);
      }
      ++it->second.count;
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](const std::string &a, const std::string &b) {
    return counts[a].count > counts[b].count;
  });
  Vocabulary vocab;
  const std::size_t keep = std::min(order.size(), cap - kReserved);
  for (std::size_t i = 0; i < keep; ++i) vocab.Add(order[i]);
  return vocab;
}

void Vocabulary::Add(std::string token) {
  auto id = static_cast<std::int32_t>(size());
  ids_.emplace(token, id);
  tokens_.push_back(std::move(token));
}

std::int32_t Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

const std::string &Vocabulary::token(std::int32_t id) const {
  static const std::string kPadToken = "<pad>";
  static const std::string kUnkToken = "<unk>";
  if (id == kPad) return kPadToken;
  if (id == kUnk) return kUnkToken;
  return tokens_.at(static_cast<std::size_t>(id) - kReserved);
}

std::string Vocabulary::Serialize() const {
  std::string out;
  for (const auto &t : tokens_) {
    out += t;
    out.push_back('\n');
  }
  return out;
}

void Vocabulary::Save(const std::string &path) const { WriteFile(path, Serialize()); }

Vocabulary Vocabulary::Load(const std::string &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot open vocabulary " + path);
  Vocabulary vocab;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || vocab.ids_.count(line)) {
      Fail(ErrorKind::kParse, path + ":" + std::to_string(line_no) + ": empty or repeated token");
    }
    vocab.Add(line);
  }
  return vocab;
}

std::size_t TokenSequence::real_tokens() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

void TokenSequence::pad_to(std::size_t n) {
  if (ids.size() >= n) return;
  ids.resize(n, Vocabulary::kPad);
  mask.resize(n, 0);
}

TokenSequence EncodeIds(const std::vector<std::string> &tokens, const Vocabulary &vocab, std::size_t max_len) {
  TokenSequence seq;
  const std::size_t n = std::min(tokens.size(), max_len);
  seq.ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) seq.ids.push_back(vocab.id(tokens[i]));
  seq.mask.assign(n, 1);
  return seq;
}

}  // namespace kgnews
