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

#include "kgnews/config.hpp"

#include <cctype>
#include <charconv>
#include <filesystem>
#include <functional>
#include <map>
#include <variant>
#include <vector>

#include "kgnews/binary_io.hpp"
#include "kgnews/error.hpp"

namespace kgnews {
namespace {

struct Value;
using Array = std::vector<Value>;
struct Value {
  std::variant<std::string, std::int64_t, double, bool, Array> v;
};

class Parser {
 public:
  Parser(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  std::map<std::string, std::pair<Value, std::size_t>> Parse() {
    std::map<std::string, std::pair<Value, std::size_t>> out;
    std::string section;
    std::size_t start = 0;
    while (start <= text_.size()) {
      std::size_t end = text_.find('\n', start);
      if (end == std::string_view::npos) end = text_.size();
      ++line_;
      line_text_ = text_.substr(start, end - start);
      pos_ = 0;
      SkipSpace();
      if (!AtEnd() && Peek() != '#') {
        if (Peek() == '[') {
          ++pos_;
          section = Bare();
          SkipSpace();
          Expect(']');
          if (section.empty()) Error("empty section name");
        } else {
          std::string key = Bare();
          if (key.empty()) Error("expected key");
          SkipSpace();
          Expect('=');
          SkipSpace();
          Value value = ParseValue();
          std::string full = section.empty() ? key : section + "." + key;
          if (out.count(full)) Error("duplicate key " + full);
          out.emplace(full, std::make_pair(std::move(value), line_));
        }
        SkipSpace();
        if (!AtEnd() && Peek() != '#') Error("unexpected trailing characters");
      }
      start = end + 1;
    }
    return out;
  }

 private:
  [[noreturn]] void Error(const std::string &what) const {
    Fail(ErrorKind::kConfig, source_ + ":" + std::to_string(line_) + ": " + what);
  }
  bool AtEnd() const { return pos_ >= line_text_.size(); }
  char Peek() const { return line_text_[pos_]; }
  void SkipSpace() {
    while (!AtEnd() && (Peek() == ' ' || Peek() == '\t' || Peek() == '\r')) ++pos_;
  }
  void Expect(char c) {
    if (AtEnd() || Peek() != c) Error(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string Bare() {
    SkipSpace();
    std::size_t b = pos_;
    while (!AtEnd() && (std::isalnum(static_cast<unsigned char>(Peek())) || Peek() == '_' || Peek() == '-')) ++pos_;
    return std::string(line_text_.substr(b, pos_ - b));
  }

  Value ParseValue() {
    if (AtEnd()) Error("missing value");
    char c = Peek();
    if (c == '"') return Value{ParseString()};
    if (c == '[') {
      ++pos_;
      Array items;
      SkipSpace();
      if (!AtEnd() && Peek() == ']') {
        ++pos_;
        return Value{std::move(items)};
      }
      for (;;) {
        SkipSpace();
        items.push_back(ParseValue());
        SkipSpace();
        if (!AtEnd() && Peek() == ',') {
          ++pos_;
          continue;
        }
        Expect(']');
        return Value{std::move(items)};
      }
    }
    std::size_t b = pos_;
    while (!AtEnd() && Peek() != ',' && Peek() != ']' && Peek() != '#' && Peek() != ' ' && Peek() != '\t' &&
           Peek() != '\r') {
      ++pos_;
    }
    std::string_view tok = line_text_.substr(b, pos_ - b);
    if (tok == "true") return Value{true};
    if (tok == "false") return Value{false};
    const bool is_float = tok.find_first_of(".eE") != std::string_view::npos && tok.find("inf") == std::string_view::npos;
    if (is_float) {
      double d = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), d);
      if (ec != std::errc() || p != tok.data() + tok.size()) Error("invalid number \"" + std::string(tok) + "\"");
      return Value{d};
    }
    std::int64_t i = 0;
    const char *first = tok.data();
    if (!tok.empty() && tok[0] == '+') ++first;
    auto [p, ec] = std::from_chars(first, tok.data() + tok.size(), i);
    if (tok.empty() || ec != std::errc() || p != tok.data() + tok.size()) {
      Error("invalid value \"" + std::string(tok) + "\" (strings need double quotes)");
    }
    return Value{i};
  }

  std::string ParseString() {
    ++pos_;
    std::string out;
    while (!AtEnd()) {
      char c = Peek();
      ++pos_;
      if (c == '"') return out;
      if (c == '\\') {
        if (AtEnd()) break;
        char e = Peek();
        ++pos_;
        switch (e) {
          case 'n':
            out.push_back('\n');
            break;
          case 't':
            out.push_back('\t');
            break;
          case '"':
          case '\\':
            out.push_back(e);
            break;
          default:
            Error(std::string("unsupported escape \\") + e);
        }
        continue;
      }
      out.push_back(c);
    }
    Error("unterminated string");
  }

  std::string_view text_;
  std::string source_;
  std::string_view line_text_;
  std::size_t line_ = 0;
  std::size_t pos_ = 0;
};

struct Binder {
  const std::string &source;
  std::string key;
  std::size_t line;
  const Value &value;

  [[noreturn]] void Error(const std::string &what) const {
    Fail(ErrorKind::kConfig, source + ":" + std::to_string(line) + ": " + key + ": " + what);
  }
  std::string String() const {
    if (auto *s = std::get_if<std::string>(&value.v)) return *s;
    Error("expected a string");
  }
  bool Bool() const {
    if (auto *b = std::get_if<bool>(&value.v)) return *b;
    Error("expected true or false");
  }
  double Double() const {
    if (auto *d = std::get_if<double>(&value.v)) return *d;
    if (auto *i = std::get_if<std::int64_t>(&value.v)) return static_cast<double>(*i);
    Error("expected a number");
  }
  std::uint64_t Unsigned() const {
    if (auto *i = std::get_if<std::int64_t>(&value.v); i && *i >= 0) return static_cast<std::uint64_t>(*i);
    Error("expected a non-negative integer");
  }
  std::size_t Positive() const {
    std::uint64_t v = Unsigned();
    if (v == 0) Error("must be positive");
    return static_cast<std::size_t>(v);
  }
  std::vector<std::uint64_t> UnsignedList() const {
    auto *a = std::get_if<Array>(&value.v);
    if (!a) Error("expected an array of integers");
    std::vector<std::uint64_t> out;
    for (const Value &item : *a) {
      Binder inner{source, key, line, item};
      out.push_back(inner.Unsigned());
    }
    return out;
  }
};

using Setter = std::function<void(RunConfig &, const Binder &)>;

const std::map<std::string, Setter> &Setters() {
  static const std::map<std::string, Setter> setters = {
      {"run.dataset", [](RunConfig &c, const Binder &b) { c.dataset = b.String(); }},

      {"paths.triples", [](RunConfig &c, const Binder &b) { c.paths.triples = b.String(); }},
      {"paths.aliases", [](RunConfig &c, const Binder &b) { c.paths.aliases = b.String(); }},
      {"paths.news", [](RunConfig &c, const Binder &b) { c.paths.news = b.String(); }},
      {"paths.bias", [](RunConfig &c, const Binder &b) { c.paths.bias = b.String(); }},
      {"paths.output", [](RunConfig &c, const Binder &b) { c.paths.output = b.String(); }},
      {"paths.processed", [](RunConfig &c, const Binder &b) { c.paths.processed = b.String(); }},
      {"paths.embeddings", [](RunConfig &c, const Binder &b) { c.paths.embeddings = b.String(); }},

      {"kg.dim", [](RunConfig &c, const Binder &b) { c.kg.dim = b.Positive(); }},
      {"kg.learning_rate",
       [](RunConfig &c, const Binder &b) {
         c.kg.learning_rate = b.Double();
         if (!(c.kg.learning_rate >= 0)) b.Error("must be non-negative");
       }},
      {"kg.l2_lambda",
       [](RunConfig &c, const Binder &b) {
         c.kg.l2_lambda = b.Double();
         if (!(c.kg.l2_lambda >= 0)) b.Error("must be non-negative");
       }},
      {"kg.negatives", [](RunConfig &c, const Binder &b) { c.kg.negatives_per_positive = b.Positive(); }},
      {"kg.epochs", [](RunConfig &c, const Binder &b) { c.kg.epochs = b.Unsigned(); }},
      {"kg.batch_size", [](RunConfig &c, const Binder &b) { c.kg.batch_size = b.Positive(); }},
      {"kg.seed", [](RunConfig &c, const Binder &b) { c.kg.seed = b.Unsigned(); }},
      {"kg.holdout",
       [](RunConfig &c, const Binder &b) {
         c.kg_holdout = b.Double();
         if (!(c.kg_holdout >= 0 && c.kg_holdout < 1)) b.Error("must lie in [0, 1)");
       }},
      {"kg.eval_limit", [](RunConfig &c, const Binder &b) { c.kg_eval_limit = b.Positive(); }},

      {"encoder.embed_dim", [](RunConfig &c, const Binder &b) { c.shape.embed_dim = b.Positive(); }},
      {"encoder.hidden", [](RunConfig &c, const Binder &b) { c.shape.hidden = b.Positive(); }},
      {"encoder.vocab_cap",
       [](RunConfig &c, const Binder &b) {
         c.vocab_cap = b.Positive();
         if (c.vocab_cap < Vocabulary::kReserved + 1) b.Error("must exceed the two reserved ids");
       }},
      {"encoder.max_tokens", [](RunConfig &c, const Binder &b) { c.max_tokens = b.Positive(); }},

      {"classifier.hidden", [](RunConfig &c, const Binder &b) { c.shape.classifier_hidden = b.Positive(); }},

      {"protocol.batch_size", [](RunConfig &c, const Binder &b) { c.protocol.batch_size = b.Positive(); }},
      {"protocol.max_epochs", [](RunConfig &c, const Binder &b) { c.protocol.max_epochs = b.Positive(); }},
      {"protocol.patience", [](RunConfig &c, const Binder &b) { c.protocol.patience = b.Positive(); }},
      {"protocol.seeds",
       [](RunConfig &c, const Binder &b) {
         c.protocol.seeds = b.UnsignedList();
         if (c.protocol.seeds.empty()) b.Error("needs at least one seed");
       }},
      {"protocol.split_ratio",
       [](RunConfig &c, const Binder &b) {
         c.protocol.split_ratio = b.Double();
         if (!(c.protocol.split_ratio > 0 && c.protocol.split_ratio < 1)) b.Error("must lie in (0, 1)");
       }},
      {"protocol.split_seed", [](RunConfig &c, const Binder &b) { c.split_seed = b.Unsigned(); }},
      {"protocol.learning_rate",
       [](RunConfig &c, const Binder &b) {
         c.protocol.learning_rate = b.Double();
         if (!(c.protocol.learning_rate >= 0)) b.Error("must be non-negative");
       }},
      {"protocol.save_checkpoints", [](RunConfig &c, const Binder &b) { c.save_checkpoints = b.Bool(); }},

      {"ned.backend",
       [](RunConfig &c, const Binder &b) {
         std::string kind = b.String();
         if (kind == "offline") {
           c.ned.kind = NedBackend::Kind::kOfflinePrior;
         } else if (kind == "remote") {
           c.ned.kind = NedBackend::Kind::kRemoteLookup;
         } else {
           b.Error("expected \"offline\" or \"remote\"");
         }
       }},
      {"ned.base_url", [](RunConfig &c, const Binder &b) { c.ned.endpoint.base_url = b.String(); }},
      {"ned.path", [](RunConfig &c, const Binder &b) { c.ned.endpoint.path = b.String(); }},
      {"ned.language", [](RunConfig &c, const Binder &b) { c.ned.endpoint.language = b.String(); }},
      {"ned.timeout_ms",
       [](RunConfig &c, const Binder &b) {
         c.ned.endpoint.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(b.Positive()));
       }},
      {"ned.max_in_flight", [](RunConfig &c, const Binder &b) { c.ned.endpoint.max_in_flight = b.Positive(); }},
      {"ned.max_retries",
       [](RunConfig &c, const Binder &b) {
         std::uint64_t r = b.Unsigned();
         if (r > 1) b.Error("at most one retry is allowed");
         c.ned.endpoint.max_retries = static_cast<int>(r);
       }},
      {"ned.strict_case", [](RunConfig &c, const Binder &b) { c.ned.strict_case = b.Bool(); }},

      {"synth.n_items", [](RunConfig &c, const Binder &b) { c.synth.n_items = b.Positive(); }},
      {"synth.n_entities", [](RunConfig &c, const Binder &b) { c.synth.n_entities = b.Positive(); }},
      {"synth.cluster_size", [](RunConfig &c, const Binder &b) { c.synth.fake_signal_cluster_size = b.Positive(); }},
      {"synth.label_noise",
       [](RunConfig &c, const Binder &b) {
         c.synth.label_noise_rate = b.Double();
         if (!(c.synth.label_noise_rate >= 0 && c.synth.label_noise_rate <= 1)) b.Error("must lie in [0, 1]");
       }},
      {"synth.seed", [](RunConfig &c, const Binder &b) { c.synth.seed = b.Unsigned(); }},
      {"synth.aliases_per_entity", [](RunConfig &c, const Binder &b) { c.synth.aliases_per_entity = b.Positive(); }},
      {"synth.background_out_degree",
       [](RunConfig &c, const Binder &b) { c.synth.background_out_degree = b.Unsigned(); }},
      {"synth.background_relations",
       [](RunConfig &c, const Binder &b) { c.synth.background_relations = b.Positive(); }},
  };
  return setters;
}

}  // namespace

std::string RunConfig::Resolve(const std::string &path) const {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return p.string();
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

std::string RunConfig::ProcessedPath() const {
  if (!paths.processed.empty()) return Resolve(paths.processed);
  return (std::filesystem::path(OutputDir()) / "processed.jsonl").string();
}

std::string RunConfig::EmbeddingsPath() const {
  if (!paths.embeddings.empty()) return Resolve(paths.embeddings);
  return (std::filesystem::path(OutputDir()) / "embeddings.cplx").string();
}

RunConfig ParseRunConfig(std::string_view text, const std::string &base_dir, const std::string &source) {
  RunConfig config;
  config.base_dir = base_dir.empty() ? "." : base_dir;
  Parser parser(text, source);
  const auto &setters = Setters();
  for (const auto &[key, entry] : parser.Parse()) {
    auto it = setters.find(key);
    if (it == setters.end()) {
      Fail(ErrorKind::kConfig, source + ":" + std::to_string(entry.second) + ": unknown key \"" + key + "\"");
    }
    it->second(config, Binder{source, key, entry.second, entry.first});
  }
  return config;
}

RunConfig LoadRunConfig(const std::string &path) {
  if (!std::filesystem::exists(path)) Fail(ErrorKind::kConfig, "config file not found: " + path);
  std::string text = ReadFile(path);
  std::string base = std::filesystem::path(path).parent_path().string();
  return ParseRunConfig(text, base.empty() ? "." : base, path);
}

void ApplySeedOverride(RunConfig &config, std::uint64_t seed) {
  config.kg.seed = seed;
  config.split_seed = seed;
  config.synth.seed = seed;
  for (std::size_t i = 0; i < config.protocol.seeds.size(); ++i) config.protocol.seeds[i] = seed + i;
}

}  // namespace kgnews
