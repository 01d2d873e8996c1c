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
#include <complex>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "kgnews/complex_embedding.hpp"
#include "kgnews/error.hpp"
#include "kgnews/random.hpp"
#include "test_util.hpp"

using namespace kgnews;

namespace {

TripleStore Store(const std::string &text) {
  std::istringstream in(text);
  return LoadTriples(in, "<mem>");
}

void FillRandom(ComplExModel &m, std::mt19937 &gen, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  for (auto *t : {&m.entity_re_table(), &m.entity_im_table(), &m.relation_re_table(), &m.relation_im_table()}) {
    for (double &v : *t) v = u(gen);
  }
}

double ComplexScore(const ComplExModel &m, EntityId h, RelationId r, EntityId t) {
  std::complex<double> sum = 0;
  for (std::size_t k = 0; k < m.dim(); ++k) {
    std::complex<double> eh(m.entity_re(h)[k], m.entity_im(h)[k]);
    std::complex<double> wr(m.relation_re(r)[k], m.relation_im(r)[k]);
    std::complex<double> et(m.entity_re(t)[k], m.entity_im(t)[k]);
    sum += eh * wr * std::conj(et);
  }
  return sum.real();
}

LabeledTriple L(std::uint32_t h, std::uint32_t r, std::uint32_t t, int y) {
  return LabeledTriple{Triple{EntityId{h}, RelationId{r}, EntityId{t}}, y};
}

// Ranks of the true tail and head with filtering and pessimistic ties,
// recomputed by sorting every candidate score.
std::vector<std::size_t> ExhaustiveRanks(const ComplExModel &m, const TripleStore &store, const Triple &q) {
  std::vector<std::size_t> ranks;
  for (int side = 0; side < 2; ++side) {
    std::vector<std::pair<double, int>> scored;  // (score, is_target)
    for (std::uint32_t e = 0; e < m.num_entities(); ++e) {
      Triple c = q;
      (side == 0 ? c.tail : c.head) = EntityId{e};
      const bool target = c == q;
      if (!target && store.contains(c)) continue;
      scored.push_back({Score(m, c.head, c.relation, c.tail), target ? 1 : 0});
    }
    // Higher score first; among equal scores the target goes last.
    std::sort(scored.begin(), scored.end(), [](auto a, auto b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (std::size_t i = 0; i < scored.size(); ++i) {
      if (scored[i].second) ranks.push_back(i + 1);
    }
  }
  return ranks;
}

}  // namespace

TEST_CASE("init is seeded and bounded") {
  KgTrainConfig c;
  c.dim = 4;
  c.seed = 1;
  ComplExModel a = InitModel(10, 3, c), b = InitModel(10, 3, c);
  CHECK(a == b);
  c.seed = 2;
  CHECK_FALSE(a == InitModel(10, 3, c));
  for (auto *t : {&a.entity_re_table(), &a.entity_im_table(), &a.relation_re_table(), &a.relation_im_table()}) {
    for (double v : *t) CHECK(std::abs(v) <= 0.25);
  }
  CHECK_THROWS_AS(InitModel(0, 3, c), Error);
  CHECK_THROWS_AS(InitModel(3, 0, c), Error);
}

TEST_CASE("score examples") {
  ComplExModel zero(3, 1, 4);
  CHECK(Score(zero, EntityId{0}, RelationId{0}, EntityId{1}) == 0.0);

  ComplExModel one(2, 1, 1);
  one.entity_re(EntityId{0})[0] = 1;
  one.entity_re(EntityId{1})[0] = 1;
  one.relation_re(RelationId{0})[0] = 1;
  CHECK(Score(one, EntityId{0}, RelationId{0}, EntityId{1}) == 1.0);

  std::mt19937 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    ComplExModel m(3, 2, 2);
    FillRandom(m, gen);
    for (std::uint32_t h = 0; h < 3; ++h) {
      for (std::uint32_t t = 0; t < 3; ++t) {
        CHECK(Score(m, EntityId{h}, RelationId{1}, EntityId{t}) ==
              doctest::Approx(ComplexScore(m, EntityId{h}, RelationId{1}, EntityId{t})).epsilon(1e-13));
      }
    }
  }
  CHECK_THROWS_AS(Score(zero, EntityId{3}, RelationId{0}, EntityId{0}), Error);
  CHECK_THROWS_AS(Score(zero, EntityId{0}, RelationId{1}, EntityId{0}), Error);
}

TEST_CASE("symmetric and antisymmetric relations") {
  std::mt19937 gen(17);
  for (int trial = 0; trial < 200; ++trial) {
    ComplExModel m(3, 2, 5);
    FillRandom(m, gen);
    std::fill(m.relation_im(RelationId{0}).begin(), m.relation_im(RelationId{0}).end(), 0.0);
    std::fill(m.relation_re(RelationId{1}).begin(), m.relation_re(RelationId{1}).end(), 0.0);
    EntityId a{0}, b{2};
    CHECK(std::abs(Score(m, a, RelationId{0}, b) - Score(m, b, RelationId{0}, a)) <= 1e-12);
    CHECK(std::abs(Score(m, a, RelationId{1}, b) + Score(m, b, RelationId{1}, a)) <= 1e-12);
  }
}

TEST_CASE("logistic loss examples") {
  ComplExModel zero(2, 1, 2);
  std::vector<LabeledTriple> batch = {L(0, 0, 1, +1)};
  CHECK(LogisticLoss(zero, batch, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  ComplExModel ten(2, 1, 1);
  ten.entity_re(EntityId{0})[0] = 2;
  ten.entity_re(EntityId{1})[0] = 5;
  ten.relation_re(RelationId{0})[0] = 1;
  REQUIRE(Score(ten, EntityId{0}, RelationId{0}, EntityId{1}) == 10.0);
  CHECK(LogisticLoss(ten, batch, 0.0) == doctest::Approx(std::log1p(std::exp(-10.0))).epsilon(1e-12));
  CHECK(LogisticLoss(ten, batch, 0.0) == doctest::Approx(4.54e-5).epsilon(1e-3));

  CHECK(LogisticLoss(ten, batch, 1e-3) > LogisticLoss(ten, batch, 0.0));
  CHECK_THROWS_AS(LogisticLoss(ten, std::vector<LabeledTriple>{}, 0.0), Error);
}

TEST_CASE("gradients match central differences") {
  std::mt19937 gen(21);
  ComplExModel m(3, 1, 4);
  FillRandom(m, gen, 0.8);
  std::vector<LabeledTriple> batch = {L(0, 0, 1, +1), L(1, 0, 2, -1), L(2, 0, 0, +1), L(0, 0, 0, -1)};
  const double lambda = 0.01, h = 1e-5;
  ComplExGradients g = Gradients(m, batch, lambda);
  double worst = 0;
  auto check_table = [&](std::vector<double> &table, std::size_t rows, auto grad_of) {
    for (std::size_t row = 0; row < rows; ++row) {
      for (std::size_t k = 0; k < m.dim(); ++k) {
        double &x = table[row * m.dim() + k];
        const double saved = x;
        x = saved + h;
        const double up = LogisticLoss(m, batch, lambda);
        x = saved - h;
        const double down = LogisticLoss(m, batch, lambda);
        x = saved;
        worst = std::max(worst, kgtest::RelErr(grad_of(row, k), (up - down) / (2 * h)));
      }
    }
  };
  check_table(m.entity_re_table(), 3, [&](std::size_t r, std::size_t k) { return g.entities.at(r).re[k]; });
  check_table(m.entity_im_table(), 3, [&](std::size_t r, std::size_t k) { return g.entities.at(r).im[k]; });
  check_table(m.relation_re_table(), 1, [&](std::size_t r, std::size_t k) { return g.relations.at(r).re[k]; });
  check_table(m.relation_im_table(), 1, [&](std::size_t r, std::size_t k) { return g.relations.at(r).im[k]; });
  CHECK(worst < 1e-4);
}

TEST_CASE("untouched rows have no gradient") {
  std::mt19937 gen(4);
  ComplExModel m(3, 2, 4);
  FillRandom(m, gen);
  std::vector<LabeledTriple> batch = {L(0, 0, 1, +1)};
  ComplExGradients g = Gradients(m, batch, 0.1);
  CHECK(g.entities.count(2) == 0);
  CHECK(g.relations.count(1) == 0);
}

TEST_CASE("duplicating the batch doubles every gradient") {
  std::mt19937 gen(6);
  ComplExModel m(4, 2, 3);
  FillRandom(m, gen);
  std::vector<LabeledTriple> batch = {L(0, 0, 1, +1), L(2, 1, 3, -1), L(1, 1, 1, +1)};
  std::vector<LabeledTriple> twice = batch;
  twice.insert(twice.end(), batch.begin(), batch.end());
  ComplExGradients a = Gradients(m, batch, 0.05), b = Gradients(m, twice, 0.05);
  REQUIRE(a.entities.size() == b.entities.size());
  for (const auto &[id, row] : a.entities) {
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(b.entities.at(id).re[k] == doctest::Approx(2 * row.re[k]).epsilon(1e-14));
      CHECK(b.entities.at(id).im[k] == doctest::Approx(2 * row.im[k]).epsilon(1e-14));
    }
  }
  for (const auto &[id, row] : a.relations) {
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(b.relations.at(id).re[k] == doctest::Approx(2 * row.re[k]).epsilon(1e-14));
      CHECK(b.relations.at(id).im[k] == doctest::Approx(2 * row.im[k]).epsilon(1e-14));
    }
  }
}

TEST_CASE("negative sampling on two entities") {
  TripleStore s = Store("Q1\tP1\tQ2\n");
  Triple pos = s.triples()[0];
  Rng rng(1);
  bool saw_tail_swap = false;
  for (int i = 0; i < 200 && !saw_tail_swap; ++i) {
    for (const Triple &n : NegativeSample(s, pos, 1, rng)) {
      saw_tail_swap = saw_tail_swap || (n.head == pos.head && n.tail == pos.head);
    }
  }
  CHECK(saw_tail_swap);
}

TEST_CASE("negatives differ in exactly one slot") {
  std::string tsv = "Q1\tP1\tQ2\n";
  for (int i = 2; i < 10; ++i) tsv += "Q" + std::to_string(i) + "\tP2\tQ" + std::to_string(i + 1) + "\n";
  TripleStore s = Store(tsv);
  Triple pos = s.triples()[0];
  Rng rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    auto neg = NegativeSample(s, pos, 5, rng);
    REQUIRE(neg.size() == 5);
    for (const Triple &n : neg) {
      CHECK(n.relation == pos.relation);
      CHECK((n.head != pos.head) + (n.tail != pos.tail) == 1);
    }
  }
  CHECK_THROWS_AS(NegativeSample(s, pos, 0, rng), Error);
}

TEST_CASE("replacement entities are uniform") {
  // Only (Q1, P1, Q2) uses P1, so each side has exactly nine valid replacements.
  std::string tsv = "Q1\tP1\tQ2\n";
  for (int i = 2; i < 10; ++i) tsv += "Q" + std::to_string(i) + "\tP2\tQ" + std::to_string(i + 1) + "\n";
  TripleStore s = Store(tsv);
  REQUIRE(s.num_entities() == 10);
  Triple pos = s.triples()[0];
  Rng rng(99);
  std::map<std::uint32_t, int> heads, tails;
  int n_head = 0, n_tail = 0;
  for (int i = 0; i < 20000; ++i) {
    for (const Triple &n : NegativeSample(s, pos, 5, rng)) {
      if (n.head != pos.head) {
        ++heads[n.head.value];
        ++n_head;
      } else {
        ++tails[n.tail.value];
        ++n_tail;
      }
    }
  }
  CHECK(n_head + n_tail == 100000);
  CHECK(std::abs(n_head - n_tail) < 0.05 * 50000);
  REQUIRE(heads.size() == 9);
  REQUIRE(tails.size() == 9);
  for (auto [e, c] : heads) CHECK(std::abs(c - n_head / 9.0) <= 0.05 * n_head / 9.0);
  for (auto [e, c] : tails) CHECK(std::abs(c - n_tail / 9.0) <= 0.05 * n_tail / 9.0);
}

TEST_CASE("training reduces loss, is deterministic, and lr 0 is a no-op") {
  TripleStore s = Store("A\tR\tB\nA\tR\tC\nA\tR\tD\nB\tR\tC\nB\tR\tD\nC\tR\tD\n");
  KgTrainConfig c;
  c.dim = 8;
  c.epochs = 200;
  c.batch_size = 4;
  c.seed = 5;
  ComplExModel m = InitModel(s.num_entities(), s.num_relations(), c);
  KgTrainResult r = Train(m, s, c);
  REQUIRE(r.epoch_loss.size() == 200);
  CHECK(r.epoch_loss.back() < r.epoch_loss.front());
  CHECK(m.all_finite());

  ComplExModel m2 = InitModel(s.num_entities(), s.num_relations(), c);
  KgTrainResult r2 = Train(m2, s, c);
  CHECK(r.epoch_loss == r2.epoch_loss);
  CHECK(m == m2);

  c.learning_rate = 0;
  ComplExModel frozen = InitModel(s.num_entities(), s.num_relations(), c);
  const ComplExModel before = frozen;
  Train(frozen, s, c);
  CHECK(frozen == before);
}

TEST_CASE("divergence aborts") {
  TripleStore s = Store("A\tR\tB\nB\tR\tC\n");
  KgTrainConfig c;
  c.dim = 4;
  c.epochs = 50;
  c.learning_rate = 1e200;
  ComplExModel m = InitModel(s.num_entities(), s.num_relations(), c);
  try {
    Train(m, s, c);
    FAIL("expected divergence");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kNumeric);
  }
}

TEST_CASE("perfect model ranks first") {
  // Unit vectors per entity, identity relation: the true tail e_t = e_h is the
  // only completion with a positive score.
  std::string tsv;
  for (int i = 0; i < 5; ++i) tsv += "E" + std::to_string(i) + "\tR\tE" + std::to_string(i) + "\n";
  TripleStore s = Store(tsv);
  ComplExModel m(5, 1, 5);
  for (std::uint32_t e = 0; e < 5; ++e) m.entity_re(EntityId{e})[e] = 1;
  for (std::size_t k = 0; k < 5; ++k) m.relation_re(RelationId{0})[k] = 1;
  auto metrics = EvaluateLinkPrediction(m, s.triples(), s);
  CHECK(metrics.mrr == 1.0);
  CHECK(metrics.hits_at.at(1) == 1.0);
  CHECK(metrics.hits_at.at(3) == 1.0);
  CHECK(metrics.hits_at.at(10) == 1.0);
  CHECK(metrics.n_queries == 10);
}

TEST_CASE("random model mrr stays in band") {
  std::mt19937 gen(8);
  std::uniform_int_distribution<int> ent(0, 99);
  for (int trial = 0; trial < 100; ++trial) {
    std::string tsv;
    for (int e = 0; e < 100; ++e) tsv += "E" + std::to_string(e) + "\tR\tE" + std::to_string((e + 1) % 100) + "\n";
    for (int q = 0; q < 50; ++q) tsv += "E" + std::to_string(ent(gen)) + "\tS\tE" + std::to_string(ent(gen)) + "\n";
    TripleStore s = Store(tsv);
    KgTrainConfig c;
    c.dim = 16;
    c.seed = static_cast<std::uint64_t>(trial);
    ComplExModel m = InitModel(s.num_entities(), s.num_relations(), c);
    std::vector<Triple> test(s.triples().begin() + 100, s.triples().end());
    auto metrics = EvaluateLinkPrediction(m, test, s);
    CHECK(metrics.mrr >= 0.01);
    CHECK(metrics.mrr <= 0.25);
    CHECK(metrics.hits_at.at(1) <= metrics.hits_at.at(3));
    CHECK(metrics.hits_at.at(3) <= metrics.hits_at.at(10));
  }
}

TEST_CASE("ranks match an exhaustive sort") {
  // d = 1 with hand-picked values including ties.
  TripleStore s = Store("A\tR\tB\nA\tR\tC\nB\tR\tC\n");
  ComplExModel m(3, 1, 1);
  m.entity_re(EntityId{0})[0] = 1.0;
  m.entity_re(EntityId{1})[0] = 0.5;
  m.entity_re(EntityId{2})[0] = 0.5;
  m.entity_im(EntityId{2})[0] = 0.25;
  m.relation_re(RelationId{0})[0] = 1.0;
  m.relation_im(RelationId{0})[0] = -0.5;

  double rr = 0;
  std::size_t h1 = 0, h3 = 0, n = 0;
  for (const Triple &q : s.triples()) {
    for (std::size_t rank : ExhaustiveRanks(m, s, q)) {
      rr += 1.0 / static_cast<double>(rank);
      h1 += rank <= 1;
      h3 += rank <= 3;
      ++n;
    }
  }
  auto metrics = EvaluateLinkPrediction(m, s.triples(), s);
  CHECK(metrics.n_queries == n);
  CHECK(metrics.mrr == doctest::Approx(rr / static_cast<double>(n)).epsilon(1e-15));
  CHECK(metrics.hits_at.at(1) == doctest::Approx(static_cast<double>(h1) / static_cast<double>(n)));
  CHECK(metrics.hits_at.at(3) == doctest::Approx(static_cast<double>(h3) / static_cast<double>(n)));

  // All-zero model: every score ties, so pessimistic ranks are the candidate counts.
  ComplExModel zero(3, 1, 1);
  std::vector<Triple> one = {s.triples()[0]};
  auto tied = EvaluateLinkPrediction(zero, one, s);
  std::vector<std::size_t> ranks = ExhaustiveRanks(zero, s, s.triples()[0]);
  CHECK(tied.mrr == doctest::Approx((1.0 / static_cast<double>(ranks[0]) + 1.0 / static_cast<double>(ranks[1])) / 2));
  CHECK_THROWS_AS(EvaluateLinkPrediction(m, std::vector<Triple>{}, s), Error);
}

TEST_CASE("embedding file round trip and corruption") {
  kgtest::TempDir dir("cplx");
  std::mt19937 gen(2);
  ComplExModel m(4, 2, 3);
  FillRandom(m, gen);
  m.entity_re(EntityId{0})[0] = -0.0;
  m.entity_im(EntityId{1})[2] = std::numeric_limits<double>::denorm_min();
  SaveEmbeddings(m, dir.file("e.cplx"));
  ComplExModel back = LoadEmbeddings(dir.file("e.cplx"));
  CHECK(SerializeEmbeddings(back) == SerializeEmbeddings(m));
  CHECK(std::signbit(back.entity_re(EntityId{0})[0]));

  const std::string bytes = kgtest::ReadText(dir.file("e.cplx"));
  CHECK(bytes.substr(0, 5) == "CPLX1");
  CHECK(bytes.size() == 5 + 24 + 8 * (2 * 4 * 3 + 2 * 2 * 3));
  // Header fields are little-endian.
  CHECK(static_cast<unsigned char>(bytes[5]) == 4);
  CHECK(static_cast<unsigned char>(bytes[13]) == 2);
  CHECK(static_cast<unsigned char>(bytes[21]) == 3);

  kgtest::WriteText(dir.file("trunc.cplx"), bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS_AS(LoadEmbeddings(dir.file("trunc.cplx")), Error);
  kgtest::WriteText(dir.file("short.cplx"), bytes.substr(0, 12));
  CHECK_THROWS_AS(LoadEmbeddings(dir.file("short.cplx")), Error);

  std::string wrong_dim = bytes;
  wrong_dim[21] = 4;
  kgtest::WriteText(dir.file("dim.cplx"), wrong_dim);
  CHECK_THROWS_AS(LoadEmbeddings(dir.file("dim.cplx")), Error);

  kgtest::WriteText(dir.file("extra.cplx"), bytes + "x");
  CHECK_THROWS_AS(LoadEmbeddings(dir.file("extra.cplx")), Error);

  std::string magic = bytes;
  magic[4] = '2';
  kgtest::WriteText(dir.file("magic.cplx"), magic);
  CHECK_THROWS_AS(LoadEmbeddings(dir.file("magic.cplx")), Error);
}

TEST_CASE("entity vector layout") {
  ComplExModel zero(2, 1, 3);
  CHECK(EntityVector(zero, EntityId{1}) == std::vector<double>(6, 0.0));

  ComplExModel m(1, 1, 2);
  m.entity_re(EntityId{0})[0] = 1;
  m.entity_re(EntityId{0})[1] = 2;
  m.entity_im(EntityId{0})[0] = 3;
  m.entity_im(EntityId{0})[1] = 4;
  CHECK(EntityVector(m, EntityId{0}) == std::vector<double>{1, 2, 3, 4});

  std::mt19937 gen(12);
  ComplExModel r(5, 1, 4);
  FillRandom(r, gen);
  for (std::uint32_t e = 0; e < 5; ++e) {
    std::vector<double> want(r.entity_re_table().begin() + e * 4, r.entity_re_table().begin() + e * 4 + 4);
    want.insert(want.end(), r.entity_im_table().begin() + e * 4, r.entity_im_table().begin() + e * 4 + 4);
    CHECK(EntityVector(r, EntityId{e}) == want);
  }
  CHECK_THROWS_AS(EntityVector(r, EntityId{5}), Error);
}
