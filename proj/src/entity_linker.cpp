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

#include "kgnews/entity_linker.hpp"

#include <algorithm>
#include <semaphore>

#include <httplib.h>
#include <json.hpp>

#include "kgnews/error.hpp"
#include "kgnews/tokenizer.hpp"

namespace kgnews {

struct NedBackend::State {
  explicit State(std::size_t max_in_flight)
      : slots(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(max_in_flight, 1, 1024))) {}

  std::atomic<std::size_t> fallbacks{0};
  std::counting_semaphore<1024> slots;
};

std::size_t NedBackend::fallback_count() const { return state_->fallbacks.load(); }
void NedBackend::RecordFallback() const { ++state_->fallbacks; }

std::optional<std::vector<std::string>> ParseSearchResponse(std::string_view body) {
  nlohmann::json doc = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
  auto it = doc.find("search");
  if (it == doc.end() || !it->is_array()) return std::nullopt;
  std::vector<std::string> ids;
  for (const auto &hit : *it) {
    if (!hit.is_object()) return std::nullopt;
    auto id = hit.find("id");
    if (id == hit.end() || !id->is_string()) return std::nullopt;
    ids.push_back(id->get<std::string>());
  }
  return ids;
}

RemoteQueryResult RemoteQuery(std::string_view surface, const RemoteEndpoint &endpoint) {
  RemoteQueryResult result;
  httplib::Client client(endpoint.base_url);
  if (!client.is_valid()) {
    result.error = "invalid endpoint " + endpoint.base_url;
    return result;
  }
  const auto ms = endpoint.timeout.count();
  client.set_connection_timeout(ms / 1000, (ms % 1000) * 1000);
  client.set_read_timeout(ms / 1000, (ms % 1000) * 1000);
  client.set_write_timeout(ms / 1000, (ms % 1000) * 1000);
  httplib::Params params{{"action", "wbsearchentities"},
                         {"search", std::string(surface)},
                         {"language", endpoint.language},
                         {"format", "json"}};
  httplib::Headers headers{{"User-Agent", "kgnews/0.1 (entity disambiguation)"}};

  for (int attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
    auto res = client.Get(endpoint.path, params, headers);
    if (!res) {
      result.error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      result.error = "HTTP status " + std::to_string(res->status);
      return result;
    }
    auto ids = ParseSearchResponse(res->body);
    if (!ids) {
      result.error = "malformed search response";
      return result;
    }
    result.ok = true;
    result.ids = std::move(*ids);
    result.error.clear();
    return result;
  }
  return result;
}

NedBackend::NedBackend(Kind kind, std::shared_ptr<RemoteEndpoint> endpoint)
    : kind_(kind),
      endpoint_(std::move(endpoint)),
      state_(std::make_shared<State>(endpoint_->max_in_flight)) {}

NedBackend NedBackend::Offline() { return NedBackend(Kind::kOfflinePrior, std::make_shared<RemoteEndpoint>()); }

NedBackend NedBackend::Remote(RemoteEndpoint endpoint) {
  return NedBackend(Kind::kRemoteLookup, std::make_shared<RemoteEndpoint>(std::move(endpoint)));
}

RemoteQueryResult NedBackend::Query(std::string_view surface) const {
  state_->slots.acquire();
  RemoteQueryResult result;
  try {
    result = RemoteQuery(surface, *endpoint_);
  } catch (...) {
    state_->slots.release();
    throw;
  }
  state_->slots.release();
  return result;
}

std::vector<MentionSpan> RecognizeMentions(std::span<const std::string> tokens, const AliasTable &aliases,
                                           const RecognizerOptions &options,
                                           std::span<const std::string> surface_tokens) {
  if (options.strict_case && surface_tokens.size() != tokens.size()) {
    Fail(ErrorKind::kInvalidArgument, "strict case matching needs the case-preserved tokens");
  }
  std::vector<MentionSpan> spans;
  const std::size_t n = tokens.size();
  std::size_t i = 0;
  while (i < n) {
    std::size_t matched = 0;
    if (!options.strict_case || (!surface_tokens[i].empty() && surface_tokens[i][0] >= 'A' &&
                                 surface_tokens[i][0] <= 'Z')) {
      const std::size_t longest = std::min(aliases.max_alias_token_len(), n - i);
      for (std::size_t len = longest; len >= 1; --len) {
        std::string phrase = Join(tokens, i, i + len);
        if (!aliases.candidates(phrase).empty()) {
          spans.push_back({i, i + len, std::move(phrase)});
          matched = len;
          break;
        }
      }
    }
    i += matched > 0 ? matched : 1;
  }
  return spans;
}

EntityId Disambiguate(const MentionSpan &mention, std::span<const EntityId> candidates, const NedBackend &backend,
                      const TripleStore &store) {
  if (candidates.empty()) Fail(ErrorKind::kInvalidArgument, "no candidates for mention \"" + mention.surface + "\"");
  if (backend.kind() == NedBackend::Kind::kRemoteLookup) {
    RemoteQueryResult remote = backend.Query(mention.surface);
    if (remote.ok) {
      for (const std::string &key : remote.ids) {
        if (auto e = store.find_entity(key)) return *e;
      }
    }
    backend.RecordFallback();
  }
  return candidates.front();
}

std::vector<LinkedEntity> LinkMentions(std::string_view title, const AliasTable &aliases, const TripleStore &store,
                                       const NedBackend &backend, const RecognizerOptions &options) {
  std::vector<std::string> surface = TokenizePreservingCase(title);
  std::vector<std::string> tokens = surface;
  for (std::string &t : tokens) t = AsciiLower(t);
  std::vector<LinkedEntity> linked;
  for (MentionSpan &span : RecognizeMentions(tokens, aliases, options, surface)) {
    auto candidates = aliases.candidates(span.surface);
    EntityId entity = Disambiguate(span, candidates, backend, store);
    linked.push_back({std::move(span), entity, candidates.size()});
  }
  return linked;
}

std::vector<EntityId> LinkTitle(std::string_view title, const AliasTable &aliases, const TripleStore &store,
                                const NedBackend &backend, const RecognizerOptions &options) {
  std::vector<EntityId> ids;
  for (const LinkedEntity &link : LinkMentions(title, aliases, store, backend, options)) {
    if (std::find(ids.begin(), ids.end(), link.entity) == ids.end()) ids.push_back(link.entity);
  }
  return ids;
}

}  // namespace kgnews
