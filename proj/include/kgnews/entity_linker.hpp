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

#ifndef KGNEWS_ENTITY_LINKER_HPP_
#define KGNEWS_ENTITY_LINKER_HPP_

#include <atomic>
#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgnews/kg_store.hpp"

namespace kgnews {

struct MentionSpan {
  std::size_t start_token = 0;
  std::size_t end_token = 0;  // exclusive
  std::string surface;        // normalized tokens joined by spaces

  bool operator==(const MentionSpan &) const = default;
};

struct LinkedEntity {
  MentionSpan mention;
  EntityId entity;
  std::size_t candidate_count = 0;
};

// Wikidata-style entity search endpoint.
struct RemoteEndpoint {
  std::string base_url = "https://www.wikidata.org";
  std::string path = "/w/api.php";
  std::string language = "en";
  std::chrono::milliseconds timeout{3000};
  std::size_t max_in_flight = 4;
  int max_retries = 1;
};

struct RemoteQueryResult {
  bool ok = false;
  std::vector<std::string> ids;  // in response order
  std::string error;
};

// Parses {"search":[{"id":...},...]}; nullopt on a malformed body.
std::optional<std::vector<std::string>> ParseSearchResponse(std::string_view body);

// HTTP GET action=wbsearchentities&search=<surface>&language=..&format=json.
// At most max_retries retries after a transport failure; HTTP errors are not
// retried.
RemoteQueryResult RemoteQuery(std::string_view surface, const RemoteEndpoint &endpoint);

// Disambiguation backend. The remote kind falls back to the offline prior on
// any failure and counts how often that happened.
class NedBackend {
 public:
  enum class Kind { kOfflinePrior, kRemoteLookup };

  static NedBackend Offline();
  static NedBackend Remote(RemoteEndpoint endpoint);

  Kind kind() const { return kind_; }
  const RemoteEndpoint &endpoint() const { return *endpoint_; }
  std::size_t fallback_count() const;

  // Remote lookup honoring the in-flight cap.
  RemoteQueryResult Query(std::string_view surface) const;
  void RecordFallback() const;

 private:
  struct State;
  NedBackend(Kind kind, std::shared_ptr<RemoteEndpoint> endpoint);

  Kind kind_;
  std::shared_ptr<RemoteEndpoint> endpoint_;
  std::shared_ptr<State> state_;
};

struct RecognizerOptions {
  // Require the original surface of a mention to start with an uppercase
  // letter.
  bool strict_case = false;
};

// Greedy left-to-right longest match over normalized tokens. surface_tokens
// (case preserved, same segmentation) is consulted only in strict mode.
std::vector<MentionSpan> RecognizeMentions(std::span<const std::string> tokens, const AliasTable &aliases,
                                           const RecognizerOptions &options = {},
                                           std::span<const std::string> surface_tokens = {});

EntityId Disambiguate(const MentionSpan &mention, std::span<const EntityId> candidates, const NedBackend &backend,
                      const TripleStore &store);

std::vector<LinkedEntity> LinkMentions(std::string_view title, const AliasTable &aliases, const TripleStore &store,
                                       const NedBackend &backend, const RecognizerOptions &options = {});

// Entity ids in first-mention order, deduplicated.
std::vector<EntityId> LinkTitle(std::string_view title, const AliasTable &aliases, const TripleStore &store,
                                const NedBackend &backend, const RecognizerOptions &options = {});

}  // namespace kgnews

#endif  // KGNEWS_ENTITY_LINKER_HPP_
