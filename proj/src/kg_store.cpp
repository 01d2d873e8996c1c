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

#include "kgnews/kg_store.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "kgnews/error.hpp"
#include "kgnews/tokenizer.hpp"

namespace kgnews {
namespace {

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string_view ChompCr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

void InsertSorted(std::vector<EntityId> &v, EntityId e) {
  v.insert(std::lower_bound(v.begin(), v.end(), e), e);
}

std::span<const EntityId> Lookup(const std::unordered_map<std::uint64_t, std::vector<EntityId>> &index,
                                 std::uint64_t key) {
  auto it = index.find(key);
  if (it == index.end()) return {};
  return it->second;
}

}  // namespace

std::uint32_t KeyVocabulary::intern(std::string_view key) {
  auto it = ids_.find(std::string(key));
  if (it != ids_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(keys_.size());
  keys_.emplace_back(key);
  ids_.emplace(keys_.back(), id);
  return id;
}

std::optional<std::uint32_t> KeyVocabulary::find(std::string_view key) const {
  auto it = ids_.find(std::string(key));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

bool TripleStore::add(std::string_view head, std::string_view relation, std::string_view tail) {
  Triple t{EntityId{entities_.intern(head)}, RelationId{relations_.intern(relation)},
           EntityId{entities_.intern(tail)}};
  degree_.resize(entities_.size(), 0);
  if (contains(t)) return false;
  triples_.push_back(t);
  InsertSorted(by_head_relation_[Key(t.head, t.relation)], t.tail);
  InsertSorted(by_tail_relation_[Key(t.tail, t.relation)], t.head);
  ++degree_[t.head.value];
  ++degree_[t.tail.value];
  return true;
}

std::optional<EntityId> TripleStore::find_entity(std::string_view key) const {
  auto id = entities_.find(key);
  if (!id) return std::nullopt;
  return EntityId{*id};
}

std::optional<RelationId> TripleStore::find_relation(std::string_view key) const {
  auto id = relations_.find(key);
  if (!id) return std::nullopt;
  return RelationId{*id};
}

std::span<const EntityId> TripleStore::tails(EntityId head, RelationId relation) const {
  return Lookup(by_head_relation_, Key(head, relation));
}

std::span<const EntityId> TripleStore::heads(EntityId tail, RelationId relation) const {
  return Lookup(by_tail_relation_, Key(tail, relation));
}

bool TripleStore::contains(const Triple &t) const {
  auto tails_of = tails(t.head, t.relation);
  return std::binary_search(tails_of.begin(), tails_of.end(), t.tail);
}

TripleStore LoadTriples(std::istream &in, const std::string &source, TripleLoadStats *stats) {
  TripleStore store;
  TripleLoadStats local;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = ChompCr(raw);
    if (line.empty()) continue;
    auto fields = SplitTabs(line);
    if (fields.size() != 3) {
      Fail(ErrorKind::kParse, source + ":" + std::to_string(line_no) + ": expected 3 tab-separated fields, got " +
                                  std::to_string(fields.size()));
    }
    for (auto f : fields) {
      if (f.empty()) Fail(ErrorKind::kParse, source + ":" + std::to_string(line_no) + ": empty field");
    }
    ++local.lines;
    if (store.add(fields[0], fields[1], fields[2])) {
      ++local.unique;
    } else {
      ++local.duplicates;
    }
  }
  if (local.lines == 0) Fail(ErrorKind::kParse, source + ": no triples");
  if (stats) *stats = local;
  return store;
}

TripleStore LoadTriples(const std::string &path, TripleLoadStats *stats) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot open triple file " + path);
  return LoadTriples(in, path, stats);
}

std::size_t EntityDegree(const TripleStore &store, EntityId e) {
  if (!store.valid(e)) Fail(ErrorKind::kInvalidArgument, "entity id " + std::to_string(e.value) + " out of range");
  return store.degree(e);
}

bool KnownTriple(const TripleStore &store, const Triple &t) {
  if (!store.valid(t.head) || !store.valid(t.tail) || !store.valid(t.relation)) {
    Fail(ErrorKind::kInvalidArgument, "triple references an id out of range");
  }
  return store.contains(t);
}

std::span<const EntityId> AliasTable::candidates(std::string_view normalized) const {
  auto it = alias_to_candidates_.find(std::string(normalized));
  if (it == alias_to_candidates_.end()) return {};
  return it->second;
}

std::string AliasTable::Normalize(std::string_view alias) { return NormalizePhrase(alias); }

AliasTable AliasTable::Build(const TripleStore &store, std::span<const std::pair<EntityId, std::string>> entries) {
  AliasTable table;
  for (const auto &[entity, raw] : entries) {
    if (!store.valid(entity)) Fail(ErrorKind::kInvalidArgument, "alias for unknown entity id");
    std::vector<std::string> tokens = Tokenize(raw);
    if (tokens.empty()) continue;
    auto &candidates = table.alias_to_candidates_[Join(tokens, 0, tokens.size())];
    if (std::find(candidates.begin(), candidates.end(), entity) == candidates.end()) candidates.push_back(entity);
    table.max_alias_token_len_ = std::max(table.max_alias_token_len_, tokens.size());
  }
  for (auto &[alias, candidates] : table.alias_to_candidates_) {
    std::sort(candidates.begin(), candidates.end(), [&](EntityId a, EntityId b) {
      std::size_t da = store.degree(a), db = store.degree(b);
      if (da != db) return da > db;
      return a < b;
    });
  }
  return table;
}

AliasTable LoadAliasTable(std::istream &in, const std::string &source, const TripleStore &store) {
  std::vector<std::pair<EntityId, std::string>> entries;
  std::set<std::string> unknown;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = ChompCr(raw);
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      Fail(ErrorKind::kParse, source + ":" + std::to_string(line_no) + ": expected \"entity_key<TAB>alias\"");
    }
    std::string_view key = line.substr(0, tab);
    auto entity = store.find_entity(key);
    if (!entity) {
      unknown.emplace(key);
      continue;
    }
    // Extra TAB-separated fields are further aliases of the same entity, as in
    // the Wikidata5M alias dump.
    auto fields = SplitTabs(line.substr(tab + 1));
    for (auto alias : fields) entries.emplace_back(*entity, std::string(alias));
  }
  if (!unknown.empty()) {
    std::string message = source + ": aliases reference entities missing from the triple store:";
    std::size_t shown = 0;
    for (const auto &key : unknown) {
      if (shown++ == 20) {
        message += " ... (" + std::to_string(unknown.size()) + " total)";
        break;
      }
      message += " " + key;
    }
    Fail(ErrorKind::kInvalidArgument, message);
  }
  return AliasTable::Build(store, entries);
}

AliasTable LoadAliasTable(const std::string &path, const TripleStore &store) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot open alias file " + path);
  return LoadAliasTable(in, path, store);
}

}  // namespace kgnews
