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

// kgnews command-line runner. Exit status: 0 success, 1 internal failure,
// 2 usage or configuration error.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kgnews/kgnews.h"

namespace {

int ExitCode(kgn_status status) {
  switch (status) {
    case KGN_OK:
      return 0;
    case KGN_ERR_CONFIG:
    case KGN_ERR_IO:
      return 2;
    default:
      return 1;
  }
}

int Fail(kgn_status status) {
  std::fprintf(stderr, "kgnews: %s error: %s\n", kgn_status_name(status), kgn_last_error());
  return ExitCode(status);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Knowledge-graph augmented fake news detection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kgn_version()));

  std::string config_path;
  std::string output_dir;
  std::optional<std::uint64_t> seed_override;

  using Command = kgn_status (*)(const kgn_config *, kgn_result **);
  struct Sub {
    const char *name;
    const char *help;
    Command run;
  };
  const Sub subs[] = {
      {"kg-train", "Train ComplEx embeddings and report link prediction", kgn_cmd_kg_train},
      {"preprocess", "Remove bias terms, link entities and split the news titles", kgn_cmd_preprocess},
      {"train-eval", "Train and evaluate the detector with and without entities", kgn_cmd_train_eval},
      {"synth", "Write the synthetic benchmark corpus", kgn_cmd_synth},
  };
  Command selected = nullptr;
  for (const Sub &s : subs) {
    CLI::App *sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--output", output_dir, "Output directory (overrides paths.output)");
    sub->add_option("--seed-override", seed_override, "Replace every seed in the configuration");
    sub->callback([&selected, run = s.run] { selected = run; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  kgn_config *config = nullptr;
  kgn_status status = kgn_config_load(config_path.c_str(), &config);
  if (status != KGN_OK) return Fail(status);
  if (!output_dir.empty()) status = kgn_config_set_output(config, output_dir.c_str());
  if (status == KGN_OK && seed_override) status = kgn_config_set_seed_override(config, *seed_override);
  if (status != KGN_OK) {
    kgn_config_free(config);
    return Fail(status);
  }

  kgn_result *result = nullptr;
  status = selected(config, &result);
  kgn_config_free(config);
  if (status != KGN_OK) return Fail(status);

  std::fputs(kgn_result_table(result), stdout);
  for (std::size_t i = 0; i < kgn_result_file_count(result); ++i) {
    std::fprintf(stderr, "wrote %s\n", kgn_result_file(result, i));
  }
  kgn_result_free(result);
  return 0;
}
