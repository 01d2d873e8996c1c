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

#include <doctest.h>

#include <complex>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "kgnews/kgnews.h"
#include "test_util.hpp"

namespace {

void PutU64(std::string &out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutF64(std::string &out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  PutU64(out, bits);
}

}  // namespace

TEST_CASE("status names and error reporting") {
  CHECK(std::string(kgn_status_name(KGN_OK)) == "ok");
  CHECK(std::string(kgn_status_name(KGN_ERR_CONFIG)) == "config");
  CHECK(std::strlen(kgn_version()) > 0);

  kgn_config *config = nullptr;
  CHECK(kgn_config_load("/nonexistent/run.toml", &config) == KGN_ERR_CONFIG);
  CHECK(config == nullptr);
  CHECK(std::string(kgn_last_error()).find("/nonexistent/run.toml") != std::string::npos);

  CHECK(kgn_config_parse("[kg]\nbogus = 1\n", ".", &config) == KGN_ERR_CONFIG);
  CHECK(std::string(kgn_last_error()).find("bogus") != std::string::npos);
  CHECK(kgn_config_parse(nullptr, ".", &config) == KGN_ERR_INVALID_ARGUMENT);

  kgn_store *store = nullptr;
  CHECK(kgn_store_load("/nonexistent/t.tsv", &store) == KGN_ERR_IO);
  CHECK(store == nullptr);

  // Freeing null handles is a no-op.
  kgn_config_free(nullptr);
  kgn_result_free(nullptr);
  kgn_store_free(nullptr);
  kgn_embeddings_free(nullptr);
  kgn_linker_free(nullptr);
  kgn_string_free(nullptr);
}

TEST_CASE("store queries") {
  kgtest::TempDir dir("capi_store");
  kgtest::WriteText(dir.file("t.tsv"), "Q1\tP1\tQ2\nQ2\tP1\tQ3\nQ1\tP1\tQ2\n");
  kgtest::WriteText(dir.file("bad.tsv"), "Q1\tP1\n");
  kgn_store *store = nullptr;
  CHECK(kgn_store_load(dir.file("bad.tsv").c_str(), &store) == KGN_ERR_PARSE);
  REQUIRE(kgn_store_load(dir.file("t.tsv").c_str(), &store) == KGN_OK);
  size_t e = 0, r = 0, t = 0;
  CHECK(kgn_store_counts(store, &e, &r, &t) == KGN_OK);
  CHECK(e == 3);
  CHECK(r == 1);
  CHECK(t == 2);
  size_t degree = 0;
  CHECK(kgn_store_degree(store, "Q2", &degree) == KGN_OK);
  CHECK(degree == 2);
  CHECK(kgn_store_degree(store, "Q9", &degree) == KGN_ERR_INVALID_ARGUMENT);
  int found = -1;
  CHECK(kgn_store_contains(store, "Q1", "P1", "Q2", &found) == KGN_OK);
  CHECK(found == 1);
  CHECK(kgn_store_contains(store, "Q2", "P1", "Q1", &found) == KGN_OK);
  CHECK(found == 0);
  kgn_store_free(store);
}

TEST_CASE("embedding scores match complex arithmetic") {
  kgtest::TempDir dir("capi_emb");
  kgtest::WriteText(dir.file("t.tsv"), "Q1\tP1\tQ2\nQ2\tP2\tQ3\n");
  const std::size_t ne = 3, nr = 2, d = 3;
  std::mt19937 gen(4);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> ere(ne * d), eim(ne * d), rre(nr * d), rim(nr * d);
  for (auto *v : {&ere, &eim, &rre, &rim}) {
    for (double &x : *v) x = u(gen);
  }
  std::string bytes = "CPLX1";
  PutU64(bytes, ne);
  PutU64(bytes, nr);
  PutU64(bytes, d);
  for (auto *v : {&ere, &eim, &rre, &rim}) {
    for (double x : *v) PutF64(bytes, x);
  }
  kgtest::WriteText(dir.file("e.cplx"), bytes);

  kgn_store *store = nullptr;
  kgn_embeddings *emb = nullptr;
  REQUIRE(kgn_store_load(dir.file("t.tsv").c_str(), &store) == KGN_OK);
  REQUIRE(kgn_embeddings_load(dir.file("e.cplx").c_str(), &emb) == KGN_OK);
  size_t se = 0, sr = 0, sd = 0;
  CHECK(kgn_embeddings_shape(emb, &se, &sr, &sd) == KGN_OK);
  CHECK(se == ne);
  CHECK(sr == nr);
  CHECK(sd == d);

  const char *ents[] = {"Q1", "Q2", "Q3"};
  const char *rels[] = {"P1", "P2"};
  for (std::size_t h = 0; h < ne; ++h) {
    for (std::size_t r = 0; r < nr; ++r) {
      for (std::size_t t = 0; t < ne; ++t) {
        std::complex<double> acc = 0;
        for (std::size_t k = 0; k < d; ++k) {
          acc += std::complex<double>(rre[r * d + k], rim[r * d + k]) *
                 std::complex<double>(ere[h * d + k], eim[h * d + k]) *
                 std::conj(std::complex<double>(ere[t * d + k], eim[t * d + k]));
        }
        double score = 0;
        CHECK(kgn_embeddings_score(emb, store, ents[h], rels[r], ents[t], &score) == KGN_OK);
        CHECK(std::abs(score - acc.real()) <= 1e-12);
      }
    }
  }
  double vec[6];
  CHECK(kgn_embeddings_entity_vector(emb, store, "Q2", vec, 6) == KGN_OK);
  for (std::size_t k = 0; k < d; ++k) {
    CHECK(vec[k] == ere[d + k]);
    CHECK(vec[d + k] == eim[d + k]);
  }
  CHECK(kgn_embeddings_entity_vector(emb, store, "Q2", vec, 5) == KGN_ERR_INVALID_ARGUMENT);

  kgtest::WriteText(dir.file("short.cplx"), bytes.substr(0, bytes.size() - 8));
  kgn_embeddings *broken = nullptr;
  CHECK(kgn_embeddings_load(dir.file("short.cplx").c_str(), &broken) == KGN_ERR_FORMAT);
  CHECK(broken == nullptr);
  kgn_embeddings_free(emb);
  kgn_store_free(store);
}

TEST_CASE("linker returns mention spans") {
  kgtest::TempDir dir("capi_link");
  kgtest::WriteText(dir.file("t.tsv"), "Q1\tP1\tQ2\n");
  kgtest::WriteText(dir.file("a.tsv"), "Q1\tDonald Trump\nQ2\tWhite House\n");
  kgn_store *store = nullptr;
  kgn_linker *linker = nullptr;
  REQUIRE(kgn_store_load(dir.file("t.tsv").c_str(), &store) == KGN_OK);
  REQUIRE(kgn_linker_create(store, dir.file("a.tsv").c_str(), 0, &linker) == KGN_OK);
  char *json = nullptr;
  REQUIRE(kgn_linker_link(linker, "Donald Trump visits the White House", &json) == KGN_OK);
  const std::string text = json;
  kgn_string_free(json);
  CHECK(text.find("\"key\":\"Q1\"") != std::string::npos);
  CHECK(text.find("\"key\":\"Q2\"") != std::string::npos);
  CHECK(text.find("Q1") < text.find("Q2"));
  REQUIRE(kgn_linker_link(linker, "nothing here", &json) == KGN_OK);
  CHECK(std::string(json) == "[]");
  kgn_string_free(json);
  kgn_linker_free(linker);
  kgn_store_free(store);
}

TEST_CASE("commands through the C interface") {
  kgtest::TempDir dir("capi_cmd");
  kgn_config *config = nullptr;
  const std::string text =
      "[paths]\ntriples = \"o/triples.tsv\"\naliases = \"o/aliases.tsv\"\nnews = \"o/news.csv\"\n"
      "[synth]\nn_items = 60\nn_entities = 20\ncluster_size = 4\naliases_per_entity = 2\n";
  REQUIRE(kgn_config_parse(text.c_str(), dir.path().c_str(), &config) == KGN_OK);
  REQUIRE(kgn_config_set_output(config, dir.file("o").c_str()) == KGN_OK);
  kgn_result *result = nullptr;
  REQUIRE(kgn_cmd_synth(config, &result) == KGN_OK);
  CHECK(kgn_result_file_count(result) == 3);
  CHECK(std::string(kgn_result_file(result, 0)).find("triples.tsv") != std::string::npos);
  CHECK(kgn_result_file(result, 3) == nullptr);
  CHECK(std::string(kgn_result_json(result)).find("\"n_items\": 60") != std::string::npos);
  kgn_result_free(result);

  result = nullptr;
  REQUIRE(kgn_cmd_preprocess(config, &result) == KGN_OK);
  CHECK(std::strlen(kgn_result_table(result)) > 0);
  kgn_result_free(result);

  // train-eval before kg-train: the embeddings are missing.
  result = nullptr;
  CHECK(kgn_cmd_train_eval(config, &result) == KGN_ERR_CONFIG);
  CHECK(result == nullptr);
  CHECK(std::string(kgn_last_error()).find("embeddings.cplx") != std::string::npos);
  kgn_config_free(config);
}
