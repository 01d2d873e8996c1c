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

#include "kgnews/kgnews.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "kgnews/commands.hpp"
#include "kgnews/complex_embedding.hpp"
#include "kgnews/config.hpp"
#include "kgnews/entity_linker.hpp"
#include "kgnews/error.hpp"
#include "kgnews/kg_store.hpp"

struct kgn_config {
  kgnews::RunConfig config;
};

struct kgn_result {
  std::string json;
  std::string table;
  std::vector<std::string> files;
};

struct kgn_store {
  kgnews::TripleStore store;
};

struct kgn_embeddings {
  kgnews::ComplExModel model;
};

struct kgn_linker {
  const kgnews::TripleStore *store;
  kgnews::AliasTable aliases;
  kgnews::NedBackend backend;
  kgnews::RecognizerOptions options;
};

namespace {

thread_local std::string last_error;

kgn_status StatusOf(kgnews::ErrorKind kind) {
  switch (kind) {
    case kgnews::ErrorKind::kConfig:
      return KGN_ERR_CONFIG;
    case kgnews::ErrorKind::kIo:
      return KGN_ERR_IO;
    case kgnews::ErrorKind::kParse:
      return KGN_ERR_PARSE;
    case kgnews::ErrorKind::kInvalidArgument:
      return KGN_ERR_INVALID_ARGUMENT;
    case kgnews::ErrorKind::kNumeric:
      return KGN_ERR_NUMERIC;
    case kgnews::ErrorKind::kFormat:
      return KGN_ERR_FORMAT;
    case kgnews::ErrorKind::kInternal:
      break;
  }
  return KGN_ERR_INTERNAL;
}

template <class F>
kgn_status Guard(F &&body) {
  last_error.clear();
  try {
    body();
    return KGN_OK;
  } catch (const kgnews::Error &e) {
    last_error = e.what();
    return StatusOf(e.kind());
  } catch (const std::bad_alloc &) {
    last_error = "out of memory";
  } catch (const std::exception &e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return KGN_ERR_INTERNAL;
}

void Require(bool ok, const char *what) {
  if (!ok) kgnews::Fail(kgnews::ErrorKind::kInvalidArgument, what);
}

kgnews::EntityId Entity(const kgnews::TripleStore &store, const char *key) {
  Require(key != nullptr, "null entity key");
  auto e = store.find_entity(key);
  if (!e) kgnews::Fail(kgnews::ErrorKind::kInvalidArgument, std::string("unknown entity ") + key);
  return *e;
}

kgnews::RelationId Relation(const kgnews::TripleStore &store, const char *key) {
  Require(key != nullptr, "null relation key");
  auto r = store.find_relation(key);
  if (!r) kgnews::Fail(kgnews::ErrorKind::kInvalidArgument, std::string("unknown relation ") + key);
  return *r;
}

using Command = kgnews::CommandResult (*)(const kgnews::RunConfig &);

kgn_status RunCommand(Command command, const kgn_config *config, kgn_result **out) {
  return Guard([&] {
    Require(config && out, "null argument");
    *out = nullptr;
    kgnews::CommandResult r = command(config->config);
    *out = new kgn_result{r.report.dump(2), std::move(r.table), std::move(r.written)};
  });
}

char *CopyString(const std::string &s) {
  char *p = static_cast<char *>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char *kgn_version(void) { return "0.1.0"; }

const char *kgn_status_name(kgn_status status) {
  switch (status) {
    case KGN_OK:
      return "ok";
    case KGN_ERR_INTERNAL:
      return "internal";
    case KGN_ERR_CONFIG:
      return "config";
    case KGN_ERR_IO:
      return "io";
    case KGN_ERR_PARSE:
      return "parse";
    case KGN_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case KGN_ERR_NUMERIC:
      return "numeric";
    case KGN_ERR_FORMAT:
      return "format";
  }
  return "unknown";
}

const char *kgn_last_error(void) { return last_error.c_str(); }

void kgn_string_free(char *s) { std::free(s); }

kgn_status kgn_config_load(const char *path, kgn_config **out) {
  return Guard([&] {
    Require(path && out, "null argument");
    *out = nullptr;
    *out = new kgn_config{kgnews::LoadRunConfig(path)};
  });
}

kgn_status kgn_config_parse(const char *text, const char *base_dir, kgn_config **out) {
  return Guard([&] {
    Require(text && out, "null argument");
    *out = nullptr;
    *out = new kgn_config{kgnews::ParseRunConfig(text, base_dir ? base_dir : ".")};
  });
}

kgn_status kgn_config_set_output(kgn_config *config, const char *dir) {
  return Guard([&] {
    Require(config && dir && *dir, "null or empty output directory");
    config->config.paths.output = std::filesystem::absolute(dir).lexically_normal().string();
  });
}

kgn_status kgn_config_set_seed_override(kgn_config *config, uint64_t seed) {
  return Guard([&] {
    Require(config != nullptr, "null config");
    kgnews::ApplySeedOverride(config->config, seed);
  });
}

void kgn_config_free(kgn_config *config) { delete config; }

kgn_status kgn_cmd_synth(const kgn_config *config, kgn_result **out) {
  return RunCommand(kgnews::RunSynth, config, out);
}
kgn_status kgn_cmd_kg_train(const kgn_config *config, kgn_result **out) {
  return RunCommand(kgnews::RunKgTrain, config, out);
}
kgn_status kgn_cmd_preprocess(const kgn_config *config, kgn_result **out) {
  return RunCommand(kgnews::RunPreprocess, config, out);
}
kgn_status kgn_cmd_train_eval(const kgn_config *config, kgn_result **out) {
  return RunCommand(kgnews::RunTrainEval, config, out);
}

const char *kgn_result_json(const kgn_result *result) { return result ? result->json.c_str() : ""; }
const char *kgn_result_table(const kgn_result *result) { return result ? result->table.c_str() : ""; }
size_t kgn_result_file_count(const kgn_result *result) { return result ? result->files.size() : 0; }
const char *kgn_result_file(const kgn_result *result, size_t index) {
  if (!result || index >= result->files.size()) return nullptr;
  return result->files[index].c_str();
}
void kgn_result_free(kgn_result *result) { delete result; }

kgn_status kgn_store_load(const char *path, kgn_store **out) {
  return Guard([&] {
    Require(path && out, "null argument");
    *out = nullptr;
    *out = new kgn_store{kgnews::LoadTriples(path)};
  });
}

kgn_status kgn_store_counts(const kgn_store *store, size_t *entities, size_t *relations, size_t *triples) {
  return Guard([&] {
    Require(store != nullptr, "null store");
    if (entities) *entities = store->store.num_entities();
    if (relations) *relations = store->store.num_relations();
    if (triples) *triples = store->store.size();
  });
}

kgn_status kgn_store_degree(const kgn_store *store, const char *entity, size_t *out) {
  return Guard([&] {
    Require(store && out, "null argument");
    *out = kgnews::EntityDegree(store->store, Entity(store->store, entity));
  });
}

kgn_status kgn_store_contains(const kgn_store *store, const char *head, const char *relation, const char *tail,
                              int *out) {
  return Guard([&] {
    Require(store && head && relation && tail && out, "null argument");
    auto h = store->store.find_entity(head);
    auto r = store->store.find_relation(relation);
    auto t = store->store.find_entity(tail);
    *out = h && r && t && store->store.contains(kgnews::Triple{*h, *r, *t}) ? 1 : 0;
  });
}

void kgn_store_free(kgn_store *store) { delete store; }

kgn_status kgn_embeddings_load(const char *path, kgn_embeddings **out) {
  return Guard([&] {
    Require(path && out, "null argument");
    *out = nullptr;
    *out = new kgn_embeddings{kgnews::LoadEmbeddings(path)};
  });
}

kgn_status kgn_embeddings_shape(const kgn_embeddings *emb, size_t *entities, size_t *relations, size_t *dim) {
  return Guard([&] {
    Require(emb != nullptr, "null embeddings");
    if (entities) *entities = emb->model.num_entities();
    if (relations) *relations = emb->model.num_relations();
    if (dim) *dim = emb->model.dim();
  });
}

kgn_status kgn_embeddings_score(const kgn_embeddings *emb, const kgn_store *store, const char *head,
                                const char *relation, const char *tail, double *out) {
  return Guard([&] {
    Require(emb && store && out, "null argument");
    const auto &s = store->store;
    Require(emb->model.num_entities() == s.num_entities() && emb->model.num_relations() == s.num_relations(),
            "embeddings do not match the store");
    *out = kgnews::Score(emb->model, Entity(s, head), Relation(s, relation), Entity(s, tail));
  });
}

kgn_status kgn_embeddings_entity_vector(const kgn_embeddings *emb, const kgn_store *store, const char *entity,
                                        double *out, size_t len) {
  return Guard([&] {
    Require(emb && store && out, "null argument");
    Require(len == 2 * emb->model.dim(), "buffer length must be 2 * dim");
    Require(emb->model.num_entities() == store->store.num_entities(), "embeddings do not match the store");
    std::vector<double> v = kgnews::EntityVector(emb->model, Entity(store->store, entity));
    std::memcpy(out, v.data(), v.size() * sizeof(double));
  });
}

void kgn_embeddings_free(kgn_embeddings *emb) { delete emb; }

kgn_status kgn_linker_create(const kgn_store *store, const char *aliases_path, int strict_case, kgn_linker **out) {
  return Guard([&] {
    Require(store && aliases_path && out, "null argument");
    *out = nullptr;
    *out = new kgn_linker{&store->store, kgnews::LoadAliasTable(aliases_path, store->store),
                          kgnews::NedBackend::Offline(), kgnews::RecognizerOptions{strict_case != 0}};
  });
}

kgn_status kgn_linker_link(const kgn_linker *linker, const char *title, char **json_out) {
  return Guard([&] {
    Require(linker && title && json_out, "null argument");
    *json_out = nullptr;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto &le : kgnews::LinkMentions(title, linker->aliases, *linker->store, linker->backend,
                                               linker->options)) {
      arr.push_back({{"key", linker->store->entity_key(le.entity)},
                     {"start", le.mention.start_token},
                     {"end", le.mention.end_token},
                     {"surface", le.mention.surface}});
    }
    *json_out = CopyString(arr.dump());
  });
}

void kgn_linker_free(kgn_linker *linker) { delete linker; }

}  // extern "C"
