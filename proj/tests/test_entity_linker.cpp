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

#include <algorithm>
#include <atomic>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "kgnews/entity_linker.hpp"
#include "kgnews/error.hpp"
#include "kgnews/tokenizer.hpp"

using namespace kgnews;

namespace {

struct Fixture {
  TripleStore store;
  AliasTable aliases;

  Fixture(const std::string &triples, const std::string &alias_tsv) {
    std::istringstream t(triples), a(alias_tsv);
    store = LoadTriples(t, "<triples>");
    aliases = LoadAliasTable(a, "<aliases>", store);
  }

  std::string key(EntityId e) const { return store.entity_key(e); }
};

const char kHeadline[] = "US Officials See No Link Between Trump and Russia";

Fixture HeadlineFixture() {
  return Fixture("Q22686\tP27\tQ30\nQ159\tP36\tQ649\nQ22686\tP39\tQ11696\n",
                 "Q22686\tTrump\nQ22686\tDonald Trump\nQ159\tRussia\n");
}

// Local stand-in for the search endpoint.
class StubServer {
 public:
  explicit StubServer(std::function<void(const httplib::Request &, httplib::Response &)> handler) {
    server_.Get("/w/api.php", [this, handler](const httplib::Request &req, httplib::Response &res) {
      ++hits_;
      last_query_ = req.params;
      handler(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  RemoteEndpoint endpoint(int timeout_ms = 2000) const {
    RemoteEndpoint e;
    e.base_url = "http://127.0.0.1:" + std::to_string(port_);
    e.timeout = std::chrono::milliseconds(timeout_ms);
    return e;
  }
  int hits() const { return hits_; }
  const httplib::Params &last_query() const { return last_query_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> hits_{0};
  httplib::Params last_query_;
};

}  // namespace

TEST_CASE("headline yields two mentions and two ids") {
  Fixture f = HeadlineFixture();
  std::vector<std::string> tokens = Tokenize(kHeadline);
  auto spans = RecognizeMentions(tokens, f.aliases);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].surface == "trump");
  CHECK(spans[0].start_token == 6);
  CHECK(spans[0].end_token == 7);
  CHECK(spans[1].surface == "russia");

  auto ids = LinkTitle(kHeadline, f.aliases, f.store, NedBackend::Offline());
  REQUIRE(ids.size() == 2);
  CHECK(f.key(ids[0]) == "Q22686");
  CHECK(f.key(ids[1]) == "Q159");
}

TEST_CASE("no alias hits gives no spans") {
  Fixture f = HeadlineFixture();
  auto tokens = Tokenize("Markets rally on quiet day");
  CHECK(RecognizeMentions(tokens, f.aliases).empty());
  CHECK(LinkTitle("Markets rally on quiet day", f.aliases, f.store, NedBackend::Offline()).empty());
  CHECK(LinkTitle("", f.aliases, f.store, NedBackend::Offline()).empty());
}

TEST_CASE("longest alias wins") {
  Fixture f("Q1\tP\tQ2\nQ3\tP\tQ2\n", "Q1\tNew York\nQ3\tNew York Times\n");
  auto tokens = Tokenize("Report from the New York Times today");
  auto spans = RecognizeMentions(tokens, f.aliases);
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].end_token - spans[0].start_token == 3);
  CHECK(spans[0].surface == "new york times");
  CHECK(Join(tokens, spans[0].start_token, spans[0].end_token) == spans[0].surface);

  // Every matching is enumerated; greedy keeps the 3-token one.
  std::size_t best = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (std::size_t j = i + 1; j <= tokens.size(); ++j) {
      if (!f.aliases.candidates(Join(tokens, i, j)).empty()) best = std::max(best, j - i);
    }
  }
  CHECK(best == 3);
}

TEST_CASE("strict case requires an uppercase start") {
  Fixture f = HeadlineFixture();
  RecognizerOptions strict{true};
  auto ids = LinkTitle("trump meets Russia", f.aliases, f.store, NedBackend::Offline(), strict);
  REQUIRE(ids.size() == 1);
  CHECK(f.key(ids[0]) == "Q159");
  CHECK(LinkTitle("trump meets Russia", f.aliases, f.store, NedBackend::Offline()).size() == 2);
}

TEST_CASE("disambiguation") {
  std::string tsv;
  for (int i = 0; i < 5; ++i) tsv += "Q1\tP\tX" + std::to_string(i) + "\n";
  for (int i = 0; i < 2; ++i) tsv += "Q2\tP\tY" + std::to_string(i) + "\n";
  Fixture f(tsv, "Q2\tParis\nQ1\tParis\n");
  MentionSpan m{0, 1, "paris"};
  auto offline = NedBackend::Offline();

  EntityId only = *f.store.find_entity("Q2");
  CHECK(Disambiguate(m, std::vector<EntityId>{only}, offline, f.store) == only);

  auto c = f.aliases.candidates("paris");
  CHECK(f.key(Disambiguate(m, c, offline, f.store)) == "Q1");
  CHECK(EntityDegree(f.store, c[0]) == 5);
  CHECK(EntityDegree(f.store, c[1]) == 2);

  CHECK_THROWS_AS(Disambiguate(m, std::vector<EntityId>{}, offline, f.store), Error);
  CHECK(offline.fallback_count() == 0);
}

TEST_CASE("same entity twice is reported once") {
  Fixture f = HeadlineFixture();
  auto ids = LinkTitle("Trump says Donald Trump will win", f.aliases, f.store, NedBackend::Offline());
  REQUIRE(ids.size() == 1);
  CHECK(f.key(ids[0]) == "Q22686");
  auto mentions = LinkMentions("Trump says Donald Trump will win", f.aliases, f.store, NedBackend::Offline());
  CHECK(mentions.size() == 2);
}

TEST_CASE("linking matches an exhaustive longest-first matcher") {
  // Twenty aliases: three nested chains plus single words. Chain tails never
  // start an alias, so matches from different start tokens cannot overlap.
  std::vector<std::pair<std::string, std::string>> pool;
  const char *chains[3][3] = {{"ka", "kb", "kc"}, {"ma", "mb", "mc"}, {"ra", "rb", "rc"}};
  int next = 1;
  for (auto &chain : chains) {
    std::string phrase;
    for (const char *tok : chain) {
      phrase += (phrase.empty() ? "" : " ") + std::string(tok);
      pool.push_back({"Q" + std::to_string(next++), phrase});
    }
  }
  for (const char *w : {"alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta", "iota", "kappa", "lambda"}) {
    pool.push_back({"Q" + std::to_string(next++), w});
  }
  REQUIRE(pool.size() == 20);
  // A shared alias with two candidates of different degree.
  pool.push_back({"Q20", "alpha"});

  std::string triples, alias_tsv;
  std::mt19937 gen(31);
  for (int e = 1; e <= 20; ++e) {
    for (int k = 0; k < e % 4 + 1; ++k) triples += "Q" + std::to_string(e) + "\tP\tZ" + std::to_string(k) + "\n";
  }
  for (auto &[key, alias] : pool) alias_tsv += key + "\t" + alias + "\n";
  Fixture f(triples, alias_tsv);

  // Independent expectations: the top candidate by recounted degree.
  std::map<std::string, std::string> expected_key;
  for (auto &[key, alias] : pool) {
    auto deg = [&](const std::string &k) {
      std::size_t d = 0;
      EntityId e = *f.store.find_entity(k);
      for (const Triple &t : f.store.triples()) d += (t.head == e) + (t.tail == e);
      return d;
    };
    auto it = expected_key.find(alias);
    if (it == expected_key.end()) {
      expected_key[alias] = key;
    } else {
      const std::size_t da = deg(it->second), db = deg(key);
      if (db > da || (db == da && f.store.find_entity(key)->value < f.store.find_entity(it->second)->value)) {
        it->second = key;
      }
    }
  }

  std::vector<std::string> vocab = {"ka", "kb", "kc", "ma", "mb", "mc", "ra", "rb", "rc", "alpha", "beta",
                                    "gamma", "eps", "iota", "news", "today", "the", "of", "report", "says"};
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1), len(1, 12);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> words;
    const std::size_t n = len(gen);
    for (std::size_t i = 0; i < n; ++i) words.push_back(vocab[pick(gen)]);
    std::string title;
    for (const auto &w : words) title += (title.empty() ? "" : " ") + std::string(1, char(std::toupper(w[0]))) + w.substr(1);

    // Oracle: every alias occurrence, longest first (then leftmost), keep
    // non-overlapping ones, report in text order.
    struct Occ {
      std::size_t start, len;
    };
    std::vector<Occ> occ;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j <= n; ++j) {
        if (expected_key.count(Join(words, i, j))) occ.push_back({i, j - i});
      }
    }
    std::sort(occ.begin(), occ.end(), [](Occ a, Occ b) { return a.len != b.len ? a.len > b.len : a.start < b.start; });
    std::vector<bool> used(n, false);
    std::vector<Occ> chosen;
    for (Occ o : occ) {
      bool free = true;
      for (std::size_t k = o.start; k < o.start + o.len; ++k) free = free && !used[k];
      if (!free) continue;
      for (std::size_t k = o.start; k < o.start + o.len; ++k) used[k] = true;
      chosen.push_back(o);
    }
    std::sort(chosen.begin(), chosen.end(), [](Occ a, Occ b) { return a.start < b.start; });
    std::vector<std::string> want;
    for (Occ o : chosen) {
      const std::string &k = expected_key.at(Join(words, o.start, o.start + o.len));
      if (std::find(want.begin(), want.end(), k) == want.end()) want.push_back(k);
    }

    std::vector<std::string> got;
    for (EntityId e : LinkTitle(title, f.aliases, f.store, NedBackend::Offline())) got.push_back(f.key(e));
    CHECK_MESSAGE(got == want, title);

    // Spans are sorted, disjoint and greedy-longest at their start.
    auto spans = RecognizeMentions(words, f.aliases);
    for (std::size_t s = 0; s < spans.size(); ++s) {
      CHECK(spans[s].start_token < spans[s].end_token);
      if (s > 0) CHECK(spans[s - 1].end_token <= spans[s].start_token);
      for (std::size_t j = spans[s].end_token + 1; j <= n; ++j) {
        CHECK(f.aliases.candidates(Join(words, spans[s].start_token, j)).empty());
      }
    }
  }
}

TEST_CASE("search response parsing") {
  auto ids = ParseSearchResponse(R"({"search":[{"id":"Q22686"},{"id":"Q27947481"}]})");
  REQUIRE(ids.has_value());
  CHECK(*ids == std::vector<std::string>{"Q22686", "Q27947481"});
  auto empty = ParseSearchResponse(R"({"search":[]})");
  REQUIRE(empty.has_value());
  CHECK(empty->empty());
  CHECK_FALSE(ParseSearchResponse("not json").has_value());
  CHECK_FALSE(ParseSearchResponse(R"({"results":[]})").has_value());
  CHECK_FALSE(ParseSearchResponse(R"({"search":[{"label":"x"}]})").has_value());
  CHECK_FALSE(ParseSearchResponse(R"({"search":{"id":"Q1"}})").has_value());
}

TEST_CASE("remote query against a stub") {
  StubServer server([](const httplib::Request &, httplib::Response &res) {
    res.set_content(R"({"searchinfo":{"search":"trump"},"search":[{"id":"Q99999"},{"id":"Q22686"}]})",
                    "application/json");
  });
  RemoteQueryResult r = RemoteQuery("Donald Trump", server.endpoint());
  REQUIRE(r.ok);
  CHECK(r.ids == std::vector<std::string>{"Q99999", "Q22686"});
  CHECK(server.hits() == 1);
  const auto &q = server.last_query();
  auto param = [&](const char *k) {
    auto it = q.find(k);
    return it == q.end() ? std::string() : it->second;
  };
  CHECK(param("action") == "wbsearchentities");
  CHECK(param("search") == "Donald Trump");
  CHECK(param("language") == "en");
  CHECK(param("format") == "json");

  // Remote ranking overrides the degree prior; unknown keys are skipped.
  Fixture f("Q22686\tP\tQ1\nQ7\tP\tQ1\nQ7\tP\tQ2\n", "Q22686\tTrump\nQ7\tTrump\n");
  NedBackend remote = NedBackend::Remote(server.endpoint());
  auto ids = LinkTitle("Trump visits", f.aliases, f.store, remote);
  REQUIRE(ids.size() == 1);
  CHECK(f.key(ids[0]) == "Q22686");
  CHECK(f.key(LinkTitle("Trump visits", f.aliases, f.store, NedBackend::Offline())[0]) == "Q7");
  CHECK(remote.fallback_count() == 0);
}

TEST_CASE("empty remote result falls back") {
  StubServer server([](const httplib::Request &, httplib::Response &res) {
    res.set_content(R"({"search":[]})", "application/json");
  });
  RemoteQueryResult r = RemoteQuery("nobody", server.endpoint());
  CHECK(r.ok);
  CHECK(r.ids.empty());
  Fixture f = HeadlineFixture();
  NedBackend remote = NedBackend::Remote(server.endpoint());
  auto ids = LinkTitle(kHeadline, f.aliases, f.store, remote);
  CHECK(ids.size() == 2);
  CHECK(remote.fallback_count() == 2);
}

TEST_CASE("http errors and malformed bodies are failures without retry") {
  StubServer server([](const httplib::Request &req, httplib::Response &res) {
    if (req.get_param_value("search") == "bad") {
      res.set_content("<html>", "text/html");
    } else {
      res.status = 503;
    }
  });
  CHECK_FALSE(RemoteQuery("bad", server.endpoint()).ok);
  CHECK_FALSE(RemoteQuery("down", server.endpoint()).ok);
  CHECK(server.hits() == 2);
}

TEST_CASE("timeouts retry at most once") {
  StubServer server([](const httplib::Request &, httplib::Response &res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(700));
    res.set_content(R"({"search":[{"id":"Q1"}]})", "application/json");
  });
  auto start = std::chrono::steady_clock::now();
  RemoteQueryResult r = RemoteQuery("slow", server.endpoint(200));
  auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK_FALSE(r.ok);
  CHECK(server.hits() <= 2);
  CHECK(elapsed < std::chrono::milliseconds(1500));
}

TEST_CASE("unreachable endpoint falls back to the prior") {
  RemoteEndpoint dead;
  dead.base_url = "http://127.0.0.1:1";
  dead.timeout = std::chrono::milliseconds(300);
  CHECK_FALSE(RemoteQuery("Trump", dead).ok);
  Fixture f = HeadlineFixture();
  NedBackend remote = NedBackend::Remote(dead);
  auto ids = LinkTitle(kHeadline, f.aliases, f.store, remote);
  auto offline = LinkTitle(kHeadline, f.aliases, f.store, NedBackend::Offline());
  CHECK(ids == offline);
  CHECK(remote.fallback_count() == 2);
}

TEST_CASE("concurrent remote lookups respect the in-flight cap") {
  std::atomic<int> in_flight{0}, peak{0};
  StubServer server([&](const httplib::Request &, httplib::Response &res) {
    int now = ++in_flight;
    int p = peak.load();
    while (now > p && !peak.compare_exchange_weak(p, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(30));
    --in_flight;
    res.set_content(R"({"search":[{"id":"Q159"}]})", "application/json");
  });
  RemoteEndpoint e = server.endpoint();
  e.max_in_flight = 2;
  NedBackend remote = NedBackend::Remote(e);
  std::vector<std::thread> workers;
  std::atomic<int> ok{0};
  for (int i = 0; i < 6; ++i) {
    workers.emplace_back([&] { ok += remote.Query("Russia").ok ? 1 : 0; });
  }
  for (auto &w : workers) w.join();
  CHECK(ok == 6);
  CHECK(peak.load() <= 2);
}
