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

#ifndef KGNEWS_CONFIG_HPP_
#define KGNEWS_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "kgnews/classifier.hpp"
#include "kgnews/complex_embedding.hpp"
#include "kgnews/dataset.hpp"
#include "kgnews/entity_linker.hpp"

namespace kgnews {

struct PathsConfig {
  std::string triples;
  std::string aliases;
  std::string news;
  std::string bias;
  std::string output = "out";
  std::string processed;   // default: <output>/processed.jsonl
  std::string embeddings;  // default: <output>/embeddings.cplx
};

struct NedConfig {
  NedBackend::Kind kind = NedBackend::Kind::kOfflinePrior;
  RemoteEndpoint endpoint;
  bool strict_case = false;
};

// Everything a command needs. Relative paths resolve against base_dir (the
// directory of the config file).
struct RunConfig {
  std::string dataset = "dataset";
  PathsConfig paths;

  KgTrainConfig kg;
  double kg_holdout = 0.1;
  std::size_t kg_eval_limit = 1000;

  ModelShape shape;
  std::size_t vocab_cap = kDefaultVocabCap;
  std::size_t max_tokens = kMaxSequenceLength;

  TrainProtocol protocol;
  std::uint64_t split_seed = 0;
  bool save_checkpoints = false;

  NedConfig ned;
  SyntheticSpec synth;

  std::string base_dir = ".";

  std::string Resolve(const std::string &path) const;
  std::string OutputDir() const { return Resolve(paths.output); }
  std::string ProcessedPath() const;
  std::string EmbeddingsPath() const;
};

// Flat TOML subset: [section] headers, key = value with strings, integers,
// floats, booleans and one-line arrays. Unknown keys are rejected.
RunConfig ParseRunConfig(std::string_view text, const std::string &base_dir, const std::string &source = "<config>");
RunConfig LoadRunConfig(const std::string &path);

// Replaces every seed: kg, split and synthetic seeds become s; trial seeds
// become s, s+1, ... keeping their count.
void ApplySeedOverride(RunConfig &config, std::uint64_t seed);

}  // namespace kgnews

#endif  // KGNEWS_CONFIG_HPP_
