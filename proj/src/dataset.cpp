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

#include "kgnews/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kgnews/binary_io.hpp"
#include "kgnews/error.hpp"
#include "kgnews/random.hpp"
#include "kgnews/tokenizer.hpp"

namespace kgnews {
namespace {

std::string Trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n')) --e;
  return std::string(s.substr(b, e - b));
}

// Normalized form of a single whitespace-delimited word ("" for pure punctuation).
std::string NormalizeWord(const std::string &word) {
  std::vector<std::string> t = Tokenize(word);
  return t.empty() ? std::string() : t.front();
}

const char *const kFillerWords[] = {
    "officials", "say",      "report",   "reveals",  "new",       "plan",      "after",     "claims",
    "about",     "crisis",   "over",     "response", "warns",     "experts",   "study",     "finds",
    "latest",    "update",   "meeting",  "talks",    "before",    "vote",      "week",      "support",
    "calls",     "for",      "probe",    "into",     "deal",      "health",    "policy",    "market",
    "faces",     "pressure", "amid",     "growing",  "concerns",  "leaders",   "announce",  "changes",
    "to",        "the",      "program",  "sources",  "confirm",   "local",     "group",     "launches",
    "campaign",  "against",  "rules",    "debate",   "ahead",      "future",    "public",    "reaction",
    "statement", "on",       "recent",   "events",   "analysis",  "of",        "budget",    "review",
    "court",     "ruling",   "expected", "soon",     "with",      "plans",     "questions", "remain",
    "data",      "shows",    "rise",     "in",       "cases",     "insiders",  "describe",  "tension",
    "behind",    "decision", "briefing",   "details",  "record",    "interview", "reports",   "surge",
    "early",     "results",  "suggest",  "shift",    "visit",     "draws",     "attention", "trade",
    "security",  "council",  "agency",   "media",    "coverage",  "story",     "spreads",   "online"};

std::string Capitalize(std::string w) {
  if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
  return w;
}

class WordFactory {
 public:
  explicit WordFactory(Rng &rng) : rng_(rng) {
    for (const char *w : kFillerWords) used_.insert(w);
  }

  std::string Next() {
    static constexpr std::string_view kConsonants = "bdfgklmnprstvz";
    static constexpr std::string_view kVowels = "aeiou";
    for (;;) {
      const std::size_t syllables = 2 + rng_.index(3);
      std::string w;
      for (std::size_t s = 0; s < syllables; ++s) {
        w.push_back(kConsonants[rng_.index(kConsonants.size())]);
        w.push_back(kVowels[rng_.index(kVowels.size())]);
      }
      if (used_.insert(w).second) return w;
    }
  }

 private:
  Rng &rng_;
  std::set<std::string> used_;
};

}  // namespace

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kTest:
      return "test";
    case Split::kUnassigned:
      break;
  }
  return "unassigned";
}

Split ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "test") return Split::kTest;
  if (name == "unassigned") return Split::kUnassigned;
  Fail(ErrorKind::kParse, "unknown split \"" + std::string(name) + "\"");
}

std::vector<std::vector<std::string>> ParseCsv(std::istream &in, const std::string &source) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  char c;
  auto end_field = [&]() {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&]() {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) Fail(ErrorKind::kParse, source + ":" + std::to_string(line) + ": stray quote in field");
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_row();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) Fail(ErrorKind::kParse, source + ": unterminated quoted field");
  if (!field.empty() || !row.empty()) end_row();
  return rows;
}

std::string CsvQuote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<NewsItem> LoadNewsCsv(std::istream &in, const std::string &source, CsvLoadStats *stats) {
  auto rows = ParseCsv(in, source);
  if (rows.empty()) Fail(ErrorKind::kParse, source + ": missing header");
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < rows[0].size(); ++i) column.emplace(Trim(AsciiLower(rows[0][i])), i);
  std::size_t idx[3];
  const char *names[3] = {"id", "title", "label"};
  for (int k = 0; k < 3; ++k) {
    auto it = column.find(names[k]);
    if (it == column.end()) Fail(ErrorKind::kParse, source + ": missing column \"" + names[k] + "\"");
    idx[k] = it->second;
  }
  CsvLoadStats local;
  std::vector<NewsItem> items;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto &row = rows[r];
    ++local.rows;
    auto get = [&](std::size_t i) { return i < row.size() ? row[i] : std::string(); };
    const std::string label = Trim(get(idx[2]));
    if (label != "0" && label != "1") {
      Fail(ErrorKind::kParse, source + ": row " + std::to_string(r) + ": label must be 0 or 1, got \"" + label + "\"");
    }
    std::string title = Trim(get(idx[1]));
    if (title.empty()) {
      ++local.dropped_empty_title;
      continue;
    }
    NewsItem item;
    item.id = Trim(get(idx[0]));
    item.title = std::move(title);
    item.label = label == "1" ? kFake : kTrue;
    items.push_back(std::move(item));
  }
  if (stats) *stats = local;
  return items;
}

std::vector<NewsItem> LoadNewsCsv(const std::string &path, CsvLoadStats *stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open news CSV " + path);
  return LoadNewsCsv(in, path, stats);
}

BiasTermList BiasTermList::FromPhrases(const std::vector<std::string> &raw) {
  BiasTermList list;
  std::set<std::vector<std::string>> seen;
  for (const auto &phrase : raw) {
    std::vector<std::string> tokens = Tokenize(phrase);
    if (tokens.empty() || !seen.insert(tokens).second) continue;
    list.phrases.push_back(std::move(tokens));
  }
  // Longest first; lexicographic among equal lengths.
  std::stable_sort(list.phrases.begin(), list.phrases.end(), [](const auto &a, const auto &b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
  return list;
}

BiasTermList LoadBiasTerms(const std::string &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot open bias list " + path);
  std::vector<std::string> raw;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (!line.empty()) raw.push_back(line);
  }
  return BiasTermList::FromPhrases(raw);
}

std::string RemoveBiasTerms(std::string_view title, const BiasTermList &bias) {
  std::vector<std::string> words = SplitWhitespace(title);
  std::vector<std::string> norms;
  norms.reserve(words.size());
  for (const auto &w : words) norms.push_back(NormalizeWord(w));

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto &phrase : bias.phrases) {
      std::size_t i = 0;
      while (i + phrase.size() <= norms.size()) {
        if (std::equal(phrase.begin(), phrase.end(), norms.begin() + static_cast<std::ptrdiff_t>(i))) {
          const auto first = static_cast<std::ptrdiff_t>(i);
          const auto last = first + static_cast<std::ptrdiff_t>(phrase.size());
          words.erase(words.begin() + first, words.begin() + last);
          norms.erase(norms.begin() + first, norms.begin() + last);
          changed = true;
        } else {
          ++i;
        }
      }
    }
  }
  return Join(words, 0, words.size());
}

std::string CleanTitle(std::string_view title) { return NormalizePhrase(title); }

std::vector<NewsItem> FilterLinkable(std::vector<NewsItem> items, const LinkerContext &context, FilterStats *stats) {
  FilterStats local;
  local.before = items.size();
  std::vector<NewsItem> kept;
  for (NewsItem &item : items) {
    item.linked_entities = LinkTitle(item.title, context.aliases, context.store, context.backend, context.options);
    if (!item.linked_entities.empty()) kept.push_back(std::move(item));
  }
  local.after = kept.size();
  if (stats) *stats = local;
  return kept;
}

void StratifiedSplit(std::span<NewsItem> items, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) Fail(ErrorKind::kInvalidArgument, "split ratio must lie in (0, 1)");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < items.size(); ++i) by_class[items[i].label == kFake ? 1 : 0].push_back(i);
  if (by_class[0].empty() || by_class[1].empty()) {
    Fail(ErrorKind::kInvalidArgument, "stratified split needs both classes present");
  }
  for (int label = 0; label < 2; ++label) {
    auto &idx = by_class[label];
    Rng rng(seed, /*stream=*/static_cast<std::uint64_t>(label));
    rng.shuffle(std::span<std::size_t>(idx));
    const auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(idx.size())));
    for (std::size_t k = 0; k < idx.size(); ++k) items[idx[k]].split = k < n_train ? Split::kTrain : Split::kTest;
  }
}

std::size_t ExpectedSyntheticTriples(const SyntheticSpec &spec) {
  const std::size_t c = spec.fake_signal_cluster_size;
  return c * (c - 1) + spec.n_entities * spec.background_out_degree;
}

SyntheticCorpus GenerateSynthetic(const SyntheticSpec &spec) {
  const std::size_t n = spec.n_entities;
  const std::size_t c = spec.fake_signal_cluster_size;
  if (c < 2 || c >= n) Fail(ErrorKind::kInvalidArgument, "cluster size must be at least 2 and below n_entities");
  if (!(spec.label_noise_rate >= 0.0 && spec.label_noise_rate <= 1.0)) {
    Fail(ErrorKind::kInvalidArgument, "label noise rate must lie in [0, 1]");
  }
  if (spec.n_items < 2) Fail(ErrorKind::kInvalidArgument, "need at least two news items");
  if (spec.aliases_per_entity == 0 || spec.background_relations == 0) {
    Fail(ErrorKind::kInvalidArgument, "aliases_per_entity and background_relations must be positive");
  }
  if (spec.background_out_degree + 1 > n - c) {
    Fail(ErrorKind::kInvalidArgument, "background_out_degree too large for the off-cluster entity count");
  }

  Rng rng(spec.seed, /*stream=*/0x5e7);
  auto key = [](std::size_t e) { return "Q" + std::to_string(e + 1); };
  SyntheticCorpus corpus;

  // Entities [0, c) form the fake-signal cluster, densely linked by P0.
  std::ostringstream triples;
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      if (i != j) triples << key(i) << "\tP0\t" << key(j) << '\n';
    }
  }
  // Background edges from every entity into the off-cluster part.
  for (std::size_t e = 0; e < n; ++e) {
    std::set<std::size_t> targets;
    while (targets.size() < spec.background_out_degree) {
      std::size_t t = c + rng.index(n - c);
      if (t != e) targets.insert(t);
    }
    for (std::size_t t : targets) {
      triples << key(e) << "\tP" << (1 + rng.index(spec.background_relations)) << '\t' << key(t) << '\n';
    }
  }
  corpus.triples_tsv = triples.str();

  WordFactory words(rng);
  std::vector<std::vector<std::string>> aliases(n);
  std::ostringstream alias_out;
  for (std::size_t e = 0; e < n; ++e) {
    for (std::size_t a = 0; a < spec.aliases_per_entity; ++a) {
      std::string alias = Capitalize(words.Next());
      if (a == 0) alias += " " + Capitalize(words.Next());
      alias_out << key(e) << '\t' << alias << '\n';
      aliases[e].push_back(std::move(alias));
    }
  }
  corpus.aliases_tsv = alias_out.str();

  std::vector<int> labels(spec.n_items, kTrue);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(spec.n_items / 2), kFake);
  rng.shuffle(std::span<int>(labels));

  std::ostringstream news;
  news << "id,title,label\n";
  std::vector<std::string> titles(spec.n_items);
  constexpr std::size_t kFillerCount = sizeof(kFillerWords) / sizeof(kFillerWords[0]);
  for (std::size_t i = 0; i < spec.n_items; ++i) {
    const bool fake = labels[i] == kFake;
    const std::size_t lo = fake ? 0 : c;
    const std::size_t span = fake ? c : n - c;
    const std::size_t mentions = 1 + (rng.coin() ? 1 : 0);
    std::vector<std::size_t> entities;
    while (entities.size() < mentions) {
      std::size_t e = lo + rng.index(span);
      if (std::find(entities.begin(), entities.end(), e) == entities.end()) entities.push_back(e);
    }
    std::vector<std::string> parts;
    const std::size_t fillers = 3 + rng.index(4);
    for (std::size_t f = 0; f < fillers; ++f) parts.push_back(Capitalize(kFillerWords[rng.index(kFillerCount)]));
    for (std::size_t e : entities) {
      const std::string &alias = aliases[e][rng.index(aliases[e].size())];
      parts.insert(parts.begin() + static_cast<std::ptrdiff_t>(rng.index(parts.size() + 1)), alias);
    }
    titles[i] = Join(parts, 0, parts.size());
  }

  const auto flips = static_cast<std::size_t>(std::llround(spec.label_noise_rate * static_cast<double>(spec.n_items)));
  std::vector<std::size_t> order(spec.n_items);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(std::span<std::size_t>(order));
  for (std::size_t k = 0; k < flips; ++k) labels[order[k]] = 1 - labels[order[k]];

  for (std::size_t i = 0; i < spec.n_items; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "n%05zu", i + 1);
    news << id << ',' << CsvQuote(titles[i]) << ',' << labels[i] << '\n';
  }
  corpus.news_csv = news.str();
  return corpus;
}

void WriteSynthetic(const SyntheticCorpus &corpus, const std::string &dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  WriteFile((base / "triples.tsv").string(), corpus.triples_tsv);
  WriteFile((base / "aliases.tsv").string(), corpus.aliases_tsv);
  WriteFile((base / "news.csv").string(), corpus.news_csv);
}

std::string SerializeProcessed(std::span<const NewsItem> items, const TripleStore &store) {
  std::string out;
  for (const NewsItem &item : items) {
    nlohmann::ordered_json row;
    row["id"] = item.id;
    row["title"] = item.title;
    row["label"] = item.label;
    nlohmann::ordered_json entities = nlohmann::ordered_json::array();
    for (EntityId e : item.linked_entities) entities.push_back(store.entity_key(e));
    row["entities"] = std::move(entities);
    row["split"] = std::string(SplitName(item.split));
    out += row.dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<NewsItem> LoadProcessed(const std::string &path, const TripleStore &store) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot open processed dataset " + path);
  std::vector<NewsItem> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    nlohmann::json row = nlohmann::json::parse(line, nullptr, false);
    if (row.is_discarded() || !row.is_object()) Fail(ErrorKind::kParse, where + ": invalid JSON");
    try {
      NewsItem item;
      item.id = row.at("id").get<std::string>();
      item.title = row.at("title").get<std::string>();
      item.label = row.at("label").get<int>();
      if (item.label != kFake && item.label != kTrue) Fail(ErrorKind::kParse, where + ": label must be 0 or 1");
      for (const auto &k : row.at("entities")) {
        auto e = store.find_entity(k.get<std::string>());
        if (!e) Fail(ErrorKind::kParse, where + ": entity " + k.get<std::string>() + " not in the triple store");
        item.linked_entities.push_back(*e);
      }
      item.split = ParseSplit(row.at("split").get<std::string>());
      items.push_back(std::move(item));
    } catch (const nlohmann::json::exception &e) {
      Fail(ErrorKind::kParse, where + ": " + e.what());
    }
  }
  return items;
}

}  // namespace kgnews
