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

#ifndef KGNEWS_COMMANDS_HPP_
#define KGNEWS_COMMANDS_HPP_

#include <string>
#include <vector>

#include <json.hpp>

#include "kgnews/config.hpp"

namespace kgnews {

struct CommandResult {
  nlohmann::ordered_json report;
  std::string table;                // human-readable summary
  std::vector<std::string> written;  // files produced, in write order
};

// Writes triples.tsv, aliases.tsv and news.csv to the output directory.
CommandResult RunSynth(const RunConfig &config);

// Trains ComplEx on all but a seeded holdout of the triples, writes the
// embedding checkpoint and kg_report.json.
CommandResult RunKgTrain(const RunConfig &config);

// Bias removal, linking, cleaning and the stratified split. Writes the
// processed JSON-lines file and preprocess_summary.json.
CommandResult RunPreprocess(const RunConfig &config);

// Seeded trials with the entity encoder on and off. Writes vocab.txt and
// report.json.
CommandResult RunTrainEval(const RunConfig &config);

}  // namespace kgnews

#endif  // KGNEWS_COMMANDS_HPP_
