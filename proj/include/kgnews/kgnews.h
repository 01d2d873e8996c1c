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

/* C interface to kgnews. Every call returns a kgn_status; on failure the
 * message is available from kgn_last_error() on the calling thread. */

#ifndef KGNEWS_KGNEWS_H_
#define KGNEWS_KGNEWS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(KGN_BUILDING_LIBRARY)
#define KGN_API __declspec(dllexport)
#else
#define KGN_API __declspec(dllimport)
#endif
#else
#define KGN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kgn_status {
  KGN_OK = 0,
  KGN_ERR_INTERNAL = 1,
  KGN_ERR_CONFIG = 2,
  KGN_ERR_IO = 3,
  KGN_ERR_PARSE = 4,
  KGN_ERR_INVALID_ARGUMENT = 5,
  KGN_ERR_NUMERIC = 6,
  KGN_ERR_FORMAT = 7
} kgn_status;

typedef struct kgn_config kgn_config;
typedef struct kgn_result kgn_result;
typedef struct kgn_store kgn_store;
typedef struct kgn_embeddings kgn_embeddings;
typedef struct kgn_linker kgn_linker;

KGN_API const char *kgn_version(void);
KGN_API const char *kgn_status_name(kgn_status status);
/* Message of the last failed call on this thread, "" if none. */
KGN_API const char *kgn_last_error(void);
KGN_API void kgn_string_free(char *s);

/* Run configuration */
KGN_API kgn_status kgn_config_load(const char *path, kgn_config **out);
KGN_API kgn_status kgn_config_parse(const char *text, const char *base_dir, kgn_config **out);
/* Relative dirs are taken against the current working directory. */
KGN_API kgn_status kgn_config_set_output(kgn_config *config, const char *dir);
KGN_API kgn_status kgn_config_set_seed_override(kgn_config *config, uint64_t seed);
KGN_API void kgn_config_free(kgn_config *config);

/* Commands. *out receives the report; free it with kgn_result_free. */
KGN_API kgn_status kgn_cmd_synth(const kgn_config *config, kgn_result **out);
KGN_API kgn_status kgn_cmd_kg_train(const kgn_config *config, kgn_result **out);
KGN_API kgn_status kgn_cmd_preprocess(const kgn_config *config, kgn_result **out);
KGN_API kgn_status kgn_cmd_train_eval(const kgn_config *config, kgn_result **out);

KGN_API const char *kgn_result_json(const kgn_result *result);
KGN_API const char *kgn_result_table(const kgn_result *result);
KGN_API size_t kgn_result_file_count(const kgn_result *result);
KGN_API const char *kgn_result_file(const kgn_result *result, size_t index);
KGN_API void kgn_result_free(kgn_result *result);

/* Triple store */
KGN_API kgn_status kgn_store_load(const char *path, kgn_store **out);
KGN_API kgn_status kgn_store_counts(const kgn_store *store, size_t *entities, size_t *relations, size_t *triples);
KGN_API kgn_status kgn_store_degree(const kgn_store *store, const char *entity, size_t *out);
KGN_API kgn_status kgn_store_contains(const kgn_store *store, const char *head, const char *relation,
                                      const char *tail, int *out);
KGN_API void kgn_store_free(kgn_store *store);

/* ComplEx embeddings. Keys are resolved through a store loaded from the
 * triples the embeddings were trained on. */
KGN_API kgn_status kgn_embeddings_load(const char *path, kgn_embeddings **out);
KGN_API kgn_status kgn_embeddings_shape(const kgn_embeddings *emb, size_t *entities, size_t *relations, size_t *dim);
KGN_API kgn_status kgn_embeddings_score(const kgn_embeddings *emb, const kgn_store *store, const char *head,
                                        const char *relation, const char *tail, double *out);
/* Writes [re || im]; len must be 2 * dim. */
KGN_API kgn_status kgn_embeddings_entity_vector(const kgn_embeddings *emb, const kgn_store *store, const char *entity,
                                                double *out, size_t len);
KGN_API void kgn_embeddings_free(kgn_embeddings *emb);

/* Offline entity linker. The store must outlive the linker. */
KGN_API kgn_status kgn_linker_create(const kgn_store *store, const char *aliases_path, int strict_case,
                                     kgn_linker **out);
/* *json_out: array of {"key", "start", "end", "surface"}; free with kgn_string_free. */
KGN_API kgn_status kgn_linker_link(const kgn_linker *linker, const char *title, char **json_out);
KGN_API void kgn_linker_free(kgn_linker *linker);

#ifdef __cplusplus
}
#endif

#endif /* KGNEWS_KGNEWS_H_ */
