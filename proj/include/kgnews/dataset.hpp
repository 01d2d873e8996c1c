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

#ifndef KGNEWS_DATASET_HPP_
#define KGNEWS_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgnews/entity_linker.hpp"
#include "kgnews/kg_store.hpp"
#include "kgnews/vocabulary.hpp"

namespace kgnews {

// Label convention: fake is the positive class.
inline constexpr int kFake = 1;
inline constexpr int kTrue = 0;

enum class Split { kUnassigned, kTrain, kTest };

std::string_view SplitName(Split split);
Split ParseSplit(std::string_view name);

struct NewsItem {
  std::string id;
  std::string title;
  int label = kTrue;
  std::vector<EntityId> linked_entities;
  TokenSequence token_ids;
  Split split = Split::kUnassigned;
};

// RFC-4180 CSV: quoted fields, doubled quotes, embedded newlines.
std::vector<std::vector<std::string>> ParseCsv(std::istream &in, const std::string &source);
std::string CsvQuote(std::string_view field);

struct CsvLoadStats {
  std::size_t rows = 0;
  std::size_t dropped_empty_title = 0;
};

// Requires an "id,title,label" header (extra columns are ignored).
std::vector<NewsItem> LoadNewsCsv(const std::string &path, CsvLoadStats *stats = nullptr);
std::vector<NewsItem> LoadNewsCsv(std::istream &in, const std::string &source, CsvLoadStats *stats = nullptr);

// Normalized phrases, each a token list.
struct BiasTermList {
  std::vector<std::vector<std::string>> phrases;

  static BiasTermList FromPhrases(const std::vector<std::string> &raw);
};

// One phrase per line, '#' starts a comment.
BiasTermList LoadBiasTerms(const std::string &path);

// Deletes every case-insensitive whole-phrase occurrence, longest phrases
// first, repeating until nothing matches. Words keep their original form.
std::string RemoveBiasTerms(std::string_view title, const BiasTermList &bias);

// Text cleaning: the shared tokenizer normalization.
std::string CleanTitle(std::string_view title);

struct LinkerContext {
  const AliasTable &aliases;
  const TripleStore &store;
  const NedBackend &backend;
  RecognizerOptions options;
};

struct FilterStats {
  std::size_t before = 0;
  std::size_t after = 0;
};

// Keeps items with at least one linked entity, preserving input order.
std::vector<NewsItem> FilterLinkable(std::vector<NewsItem> items, const LinkerContext &context,
                                     FilterStats *stats = nullptr);

// Per class: seeded shuffle, floor(ratio * n_class) to train, rest to test.
void StratifiedSplit(std::span<NewsItem> items, double ratio, std::uint64_t seed);

struct SyntheticSpec {
  std::size_t n_items = 1000;
  std::size_t n_entities = 200;
  std::size_t fake_signal_cluster_size = 20;
  double label_noise_rate = 0.05;
  std::uint64_t seed = 7;
  // Surface forms per entity. Many aliases per entity keep individual title
  // tokens rare while the linked entity stays the same.
  std::size_t aliases_per_entity = 48;
  std::size_t background_out_degree = 4;
  std::size_t background_relations = 4;
};

struct SyntheticCorpus {
  std::string triples_tsv;
  std::string aliases_tsv;
  std::string news_csv;
};

// Triple count is c(c-1) signal edges plus n * background_out_degree.
std::size_t ExpectedSyntheticTriples(const SyntheticSpec &spec);
SyntheticCorpus GenerateSynthetic(const SyntheticSpec &spec);
void WriteSynthetic(const SyntheticCorpus &corpus, const std::string &dir);

// Processed dataset: one JSON object per line with id, title, label,
// entities (external keys) and split.
std::string SerializeProcessed(std::span<const NewsItem> items, const TripleStore &store);
std::vector<NewsItem> LoadProcessed(const std::string &path, const TripleStore &store);

}  // namespace kgnews

#endif  // KGNEWS_DATASET_HPP_
