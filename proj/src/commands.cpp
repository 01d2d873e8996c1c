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

#include "kgnews/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>

#include "kgnews/binary_io.hpp"
#include "kgnews/classifier.hpp"
#include "kgnews/complex_embedding.hpp"
#include "kgnews/dataset.hpp"
#include "kgnews/error.hpp"
#include "kgnews/kg_store.hpp"
#include "kgnews/tokenizer.hpp"
#include "kgnews/vocabulary.hpp"

namespace kgnews {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string RequireInput(const RunConfig &config, const std::string &raw, const char *name) {
  if (raw.empty()) Fail(ErrorKind::kConfig, std::string("paths.") + name + " is not set");
  std::string path = config.Resolve(raw);
  if (!fs::exists(path)) Fail(ErrorKind::kConfig, std::string(name) + " file not found: " + path);
  return path;
}

std::string PrepareOutput(const RunConfig &config) {
  std::string dir = config.OutputDir();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) Fail(ErrorKind::kIo, "cannot create output directory " + dir);
  return dir;
}

std::string Join(const std::string &dir, const char *name) { return (fs::path(dir) / name).string(); }

void Emit(CommandResult &result, const std::string &path, const std::string &bytes) {
  WriteFile(path, bytes);
  result.written.push_back(path);
}

std::string Fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string Pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

Json MetricsJson(const LinkPredMetrics &m) {
  Json j;
  j["queries"] = m.n_queries;
  j["mrr"] = m.mrr;
  for (const auto &[k, v] : m.hits_at) j["hits@" + std::to_string(k)] = v;
  return j;
}

Json ClassCounts(std::span<const NewsItem> items) {
  std::size_t fake = 0;
  for (const NewsItem &item : items) fake += item.label == kFake ? 1 : 0;
  Json j;
  j["items"] = items.size();
  j["fake"] = fake;
  j["true"] = items.size() - fake;
  j["fake_fraction"] = items.empty() ? 0.0 : static_cast<double>(fake) / static_cast<double>(items.size());
  return j;
}

}  // namespace

CommandResult RunSynth(const RunConfig &config) {
  const SyntheticSpec &spec = config.synth;
  if (spec.fake_signal_cluster_size >= spec.n_entities) {
    Fail(ErrorKind::kConfig, "synth.cluster_size must be smaller than synth.n_entities");
  }
  if (!(spec.label_noise_rate >= 0.0 && spec.label_noise_rate <= 1.0)) {
    Fail(ErrorKind::kConfig, "synth.label_noise must lie in [0, 1]");
  }
  SyntheticCorpus corpus = GenerateSynthetic(spec);
  CommandResult result;
  const std::string dir = PrepareOutput(config);
  Emit(result, Join(dir, "triples.tsv"), corpus.triples_tsv);
  Emit(result, Join(dir, "aliases.tsv"), corpus.aliases_tsv);
  Emit(result, Join(dir, "news.csv"), corpus.news_csv);

  Json &r = result.report;
  r["dataset"] = config.dataset;
  r["seed"] = spec.seed;
  r["n_items"] = spec.n_items;
  r["n_entities"] = spec.n_entities;
  r["cluster_size"] = spec.fake_signal_cluster_size;
  r["label_noise"] = spec.label_noise_rate;
  r["triples"] = ExpectedSyntheticTriples(spec);
  r["files"] = result.written;
  result.table = "wrote " + std::to_string(spec.n_items) + " titles and " +
                 std::to_string(ExpectedSyntheticTriples(spec)) + " triples to " + dir + "\n";
  return result;
}

CommandResult RunKgTrain(const RunConfig &config) {
  const std::string triples_path = RequireInput(config, config.paths.triples, "triples");
  TripleLoadStats stats;
  TripleStore store = LoadTriples(triples_path, &stats);
  const std::string dir = PrepareOutput(config);

  std::vector<std::size_t> order(store.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(config.kg.seed, /*stream=*/3);
  rng.shuffle(std::span<std::size_t>(order));
  const auto n_holdout = static_cast<std::size_t>(std::floor(config.kg_holdout * static_cast<double>(store.size())));
  std::vector<bool> held(store.size(), false);
  for (std::size_t k = 0; k < n_holdout; ++k) held[order[k]] = true;
  std::vector<Triple> train, holdout;
  for (std::size_t i = 0; i < store.size(); ++i) (held[i] ? holdout : train).push_back(store.triples()[i]);
  if (train.empty()) Fail(ErrorKind::kConfig, "kg.holdout leaves no training triples");

  ComplExModel model = InitModel(store.num_entities(), store.num_relations(), config.kg);
  KgTrainResult trained = Train(model, store, train, config.kg);

  CommandResult result;
  const std::string emb_path = config.EmbeddingsPath();
  if (fs::path(emb_path).has_parent_path()) fs::create_directories(fs::path(emb_path).parent_path());
  SaveEmbeddings(model, emb_path);
  result.written.push_back(emb_path);

  const std::size_t limit = config.kg_eval_limit;
  std::span<const Triple> train_eval(train.data(), std::min(limit, train.size()));
  LinkPredMetrics train_metrics = EvaluateLinkPrediction(model, train_eval, store);
  Json heldout = nullptr;
  LinkPredMetrics held_metrics;
  if (!holdout.empty()) {
    held_metrics = EvaluateLinkPrediction(model, std::span<const Triple>(holdout.data(), std::min(limit, holdout.size())),
                                          store);
    heldout = MetricsJson(held_metrics);
  }

  Json &r = result.report;
  r["dataset"] = config.dataset;
  r["entities"] = store.num_entities();
  r["relations"] = store.num_relations();
  r["triples"] = store.size();
  r["duplicate_lines"] = stats.duplicates;
  r["dim"] = config.kg.dim;
  r["epochs"] = trained.epoch_loss.size();
  r["final_loss"] = trained.epoch_loss.empty() ? Json(nullptr) : Json(trained.epoch_loss.back());
  r["holdout_fraction"] = config.kg_holdout;
  r["train_triples"] = train.size();
  r["holdout_triples"] = holdout.size();
  r["train_edges"] = MetricsJson(train_metrics);
  r["heldout"] = heldout;
  Emit(result, Join(dir, "kg_report.json"), r.dump(2) + "\n");

  auto row = [](const std::string &name, const LinkPredMetrics &m) {
    return Pad(name, 8) + Pad(std::to_string(m.n_queries), 9) + Pad(Fixed(m.mrr), 8) + Pad(Fixed(m.hits_at.at(1)), 8) +
           Pad(Fixed(m.hits_at.at(3)), 8) + Fixed(m.hits_at.at(10)) + "\n";
  };
  result.table = Pad("split", 8) + Pad("queries", 9) + Pad("mrr", 8) + Pad("hits@1", 8) + Pad("hits@3", 8) + "hits@10\n";
  result.table += row("train", train_metrics);
  if (!holdout.empty()) result.table += row("heldout", held_metrics);
  return result;
}

CommandResult RunPreprocess(const RunConfig &config) {
  const std::string triples_path = RequireInput(config, config.paths.triples, "triples");
  const std::string aliases_path = RequireInput(config, config.paths.aliases, "aliases");
  const std::string news_path = RequireInput(config, config.paths.news, "news");
  BiasTermList bias;
  if (!config.paths.bias.empty()) bias = LoadBiasTerms(RequireInput(config, config.paths.bias, "bias"));
  const std::string dir = PrepareOutput(config);

  TripleStore store = LoadTriples(triples_path);
  AliasTable aliases = LoadAliasTable(aliases_path, store);
  CsvLoadStats csv_stats;
  std::vector<NewsItem> items = LoadNewsCsv(news_path, &csv_stats);
  Json before = ClassCounts(items);

  for (NewsItem &item : items) item.title = RemoveBiasTerms(item.title, bias);
  NedBackend backend = config.ned.kind == NedBackend::Kind::kRemoteLookup ? NedBackend::Remote(config.ned.endpoint)
                                                                          : NedBackend::Offline();
  LinkerContext context{aliases, store, backend, RecognizerOptions{config.ned.strict_case}};
  FilterStats filter_stats;
  items = FilterLinkable(std::move(items), context, &filter_stats);
  for (NewsItem &item : items) item.title = CleanTitle(item.title);
  StratifiedSplit(items, config.protocol.split_ratio, config.split_seed);

  CommandResult result;
  const std::string processed = config.ProcessedPath();
  if (fs::path(processed).has_parent_path()) fs::create_directories(fs::path(processed).parent_path());
  Emit(result, processed, SerializeProcessed(items, store));

  std::vector<NewsItem> train, test;
  for (const NewsItem &item : items) (item.split == Split::kTrain ? train : test).push_back(item);

  Json &r = result.report;
  r["dataset"] = config.dataset;
  r["label_convention"] = "fake=1";
  r["csv_rows"] = csv_stats.rows;
  r["dropped_empty_title"] = csv_stats.dropped_empty_title;
  r["bias_terms"] = bias.phrases.size();
  r["before_filter"] = before;
  r["after_filter"] = ClassCounts(items);
  r["dropped_unlinkable"] = filter_stats.before - filter_stats.after;
  r["split"] = {{"ratio", config.protocol.split_ratio},
                {"seed", config.split_seed},
                {"train", ClassCounts(train)},
                {"test", ClassCounts(test)}};
  r["ned"] = {{"backend", config.ned.kind == NedBackend::Kind::kRemoteLookup ? "remote" : "offline"},
              {"fallbacks", backend.fallback_count()}};
  Emit(result, Join(dir, "preprocess_summary.json"), r.dump(2) + "\n");

  result.table = "items: " + std::to_string(filter_stats.before) + " -> " + std::to_string(filter_stats.after) +
                 " linkable (fake " + Fixed(r["after_filter"]["fake_fraction"].get<double>(), 3) + ")\n" +
                 "split: " + std::to_string(train.size()) + " train, " + std::to_string(test.size()) + " test\n";
  return result;
}

CommandResult RunTrainEval(const RunConfig &config) {
  const std::string triples_path = RequireInput(config, config.paths.triples, "triples");
  const std::string processed_path = config.ProcessedPath();
  if (!fs::exists(processed_path)) Fail(ErrorKind::kConfig, "processed dataset not found: " + processed_path);
  const std::string emb_path = config.EmbeddingsPath();
  if (!fs::exists(emb_path)) Fail(ErrorKind::kConfig, "embedding checkpoint not found: " + emb_path);
  const std::string dir = PrepareOutput(config);

  TripleStore store = LoadTriples(triples_path);
  std::vector<NewsItem> items = LoadProcessed(processed_path, store);
  ComplExModel kg = LoadEmbeddings(emb_path);
  if (kg.num_entities() != store.num_entities() || kg.num_relations() != store.num_relations()) {
    Fail(ErrorKind::kFormat, emb_path + ": embedding table shape does not match " + triples_path);
  }

  std::vector<std::vector<std::string>> corpus;
  for (const NewsItem &item : items) {
    if (item.split == Split::kTrain) corpus.push_back(Tokenize(item.title));
  }
  Vocabulary vocab = Vocabulary::Build(corpus, config.vocab_cap);
  CommandResult result;
  Emit(result, Join(dir, "vocab.txt"), vocab.Serialize());

  std::vector<NewsItem> train, test;
  for (NewsItem &item : items) {
    item.token_ids = EncodeIds(Tokenize(item.title), vocab, config.max_tokens);
    if (item.split == Split::kTrain) {
      train.push_back(item);
    } else if (item.split == Split::kTest) {
      test.push_back(item);
    }
  }
  if (train.empty() || test.empty()) Fail(ErrorKind::kInvalidArgument, processed_path + ": needs train and test items");

  Json reports = Json::array();
  std::vector<TrialsReport> trials;
  for (bool enabled : {true, false}) {
    TrainProtocol protocol = config.protocol;
    protocol.entity_encoder_enabled = enabled;
    std::vector<Example> train_ex = PrepareExamples(train, kg, enabled);
    std::vector<Example> test_ex = PrepareExamples(test, kg, enabled);
    ModelSink sink;
    if (config.save_checkpoints) {
      sink = [&](std::uint64_t seed, const DetectorModel &model) {
        const std::string stem = std::string(enabled ? "entity_on" : "entity_off") + "_seed" + std::to_string(seed);
        const std::string enc = Join(dir, (stem + ".encoder").c_str());
        const std::string cls = Join(dir, (stem + ".classifier").c_str());
        SaveEncoder(model.encoder, enc);
        SaveClassifier(model.classifier, cls);
        result.written.push_back(enc);
        result.written.push_back(cls);
      };
    }
    trials.push_back(RunTrials(train_ex, test_ex, vocab.size(), 2 * kg.dim(), config.shape, protocol, sink));
    reports.push_back(TrialsReportJson(trials.back(), config.dataset));
  }

  Json &r = result.report;
  r["dataset"] = config.dataset;
  r["label_convention"] = "fake=1";
  r["vocab_size"] = vocab.size();
  r["train_items"] = train.size();
  r["test_items"] = test.size();
  r["reports"] = std::move(reports);
  Emit(result, Join(dir, "report.json"), r.dump(2) + "\n");

  result.table = Pad("dataset", 16) + Pad("entity_encoder", 16) + Pad("accuracy", 10) + "f1_macro\n";
  for (const TrialsReport &t : trials) {
    result.table += Pad(config.dataset, 16) + Pad(t.entity_encoder_enabled ? "enabled" : "disabled", 16) +
                    Pad(Fixed(t.mean_accuracy), 10) + Fixed(t.mean_f1_macro) + "\n";
  }
  return result;
}

}  // namespace kgnews
