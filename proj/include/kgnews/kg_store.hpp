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

#ifndef KGNEWS_KG_STORE_HPP_
#define KGNEWS_KG_STORE_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgnews {

struct EntityId {
  std::uint32_t value = 0;
  auto operator<=>(const EntityId &) const = default;
};

struct RelationId {
  std::uint32_t value = 0;
  auto operator<=>(const RelationId &) const = default;
};

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;
  auto operator<=>(const Triple &) const = default;
};

// Interns opaque external keys ("Q42", "P31") into dense ids in
// first-appearance order.
class KeyVocabulary {
 public:
  std::uint32_t intern(std::string_view key);
  std::optional<std::uint32_t> find(std::string_view key) const;
  const std::string &key(std::uint32_t id) const { return keys_.at(id); }
  std::size_t size() const { return keys_.size(); }

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> keys_;
};

// Deduplicated triple list with (head, relation) -> tails and
// (tail, relation) -> heads indexes. Built by a single writer, then read-only.
class TripleStore {
 public:
  // Returns false when the triple was already present.
  bool add(std::string_view head, std::string_view relation, std::string_view tail);

  std::span<const Triple> triples() const { return triples_; }
  std::size_t size() const { return triples_.size(); }
  std::size_t num_entities() const { return entities_.size(); }
  std::size_t num_relations() const { return relations_.size(); }

  const KeyVocabulary &entities() const { return entities_; }
  const KeyVocabulary &relations() const { return relations_; }
  std::optional<EntityId> find_entity(std::string_view key) const;
  std::optional<RelationId> find_relation(std::string_view key) const;
  const std::string &entity_key(EntityId e) const { return entities_.key(e.value); }

  bool valid(EntityId e) const { return e.value < entities_.size(); }
  bool valid(RelationId r) const { return r.value < relations_.size(); }

  // Sorted, possibly empty.
  std::span<const EntityId> tails(EntityId head, RelationId relation) const;
  std::span<const EntityId> heads(EntityId tail, RelationId relation) const;

  bool contains(const Triple &t) const;
  std::size_t degree(EntityId e) const { return degree_.at(e.value); }

 private:
  static std::uint64_t Key(EntityId e, RelationId r) {
    return (static_cast<std::uint64_t>(e.value) << 32) | r.value;
  }

  KeyVocabulary entities_;
  KeyVocabulary relations_;
  std::vector<Triple> triples_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> by_head_relation_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> by_tail_relation_;
  std::vector<std::size_t> degree_;
};

struct TripleLoadStats {
  std::size_t lines = 0;
  std::size_t unique = 0;
  std::size_t duplicates = 0;
};

// Reads the Wikidata5M-style "head<TAB>relation<TAB>tail" layout.
TripleStore LoadTriples(const std::string &path, TripleLoadStats *stats = nullptr);
TripleStore LoadTriples(std::istream &in, const std::string &source, TripleLoadStats *stats = nullptr);

// Head plus tail occurrences. Throws kInvalidArgument for unknown ids.
std::size_t EntityDegree(const TripleStore &store, EntityId e);
bool KnownTriple(const TripleStore &store, const Triple &t);

// Normalized surface form -> candidate entities, most connected first.
class AliasTable {
 public:
  std::span<const EntityId> candidates(std::string_view normalized) const;
  std::size_t max_alias_token_len() const { return max_alias_token_len_; }
  std::size_t size() const { return alias_to_candidates_.size(); }

  // Alias normalization: the shared tokenizer rules joined by single spaces.
  static std::string Normalize(std::string_view alias);

  // Builds a table from (entity, raw alias) pairs. Candidates are deduplicated
  // and ordered by descending degree, then ascending id.
  static AliasTable Build(const TripleStore &store,
                          std::span<const std::pair<EntityId, std::string>> entries);

 private:
  std::unordered_map<std::string, std::vector<EntityId>> alias_to_candidates_;
  std::size_t max_alias_token_len_ = 0;
};

AliasTable LoadAliasTable(const std::string &path, const TripleStore &store);
AliasTable LoadAliasTable(std::istream &in, const std::string &source, const TripleStore &store);

}  // namespace kgnews

#endif  // KGNEWS_KG_STORE_HPP_
