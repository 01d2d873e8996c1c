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

#include "kgnews/complex_embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kgnews/binary_io.hpp"
#include "kgnews/error.hpp"

namespace kgnews {
namespace {

constexpr char kMagic[] = "CPLX1";
constexpr int kMaxResample = 100;

double Softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double SquaredNorm(std::span<const double> a) {
  double s = 0;
  for (double v : a) s += v * v;
  return s;
}

void CheckIds(const ComplExModel &model, const Triple &t) {
  if (!model.valid(t.head) || !model.valid(t.tail) || !model.valid(t.relation)) {
    Fail(ErrorKind::kInvalidArgument, "triple id out of range for embedding model");
  }
}

RowGradient &Slot(std::map<std::uint32_t, RowGradient> &rows, std::uint32_t id, std::size_t dim) {
  auto [it, inserted] = rows.try_emplace(id);
  if (inserted) {
    it->second.re.assign(dim, 0.0);
    it->second.im.assign(dim, 0.0);
  }
  return it->second;
}

// Loss of the batch, and gradients into grads when non-null.
double LossAndGradients(const ComplExModel &model, std::span<const LabeledTriple> batch, double l2_lambda,
                        ComplExGradients *grads) {
  if (batch.empty()) Fail(ErrorKind::kInvalidArgument, "empty batch");
  const std::size_t d = model.dim();
  if (grads) grads->dim = d;
  double loss = 0.0;
  for (const LabeledTriple &ex : batch) {
    const Triple &t = ex.triple;
    CheckIds(model, t);
    const double y = ex.label;
    auto hr = model.entity_re(t.head), hi = model.entity_im(t.head);
    auto tr = model.entity_re(t.tail), ti = model.entity_im(t.tail);
    auto rr = model.relation_re(t.relation), ri = model.relation_im(t.relation);
    const double s = Score(model, t.head, t.relation, t.tail);
    loss += Softplus(-y * s);
    loss += l2_lambda * (SquaredNorm(hr) + SquaredNorm(hi) + SquaredNorm(tr) + SquaredNorm(ti) +
                         SquaredNorm(rr) + SquaredNorm(ri));
    if (!grads) continue;

    const double dscore = -y * Sigmoid(-y * s);
    const double two_l = 2.0 * l2_lambda;
    RowGradient &gh = Slot(grads->entities, t.head.value, d);
    for (std::size_t k = 0; k < d; ++k) {
      gh.re[k] += dscore * (rr[k] * tr[k] + ri[k] * ti[k]) + two_l * hr[k];
      gh.im[k] += dscore * (rr[k] * ti[k] - ri[k] * tr[k]) + two_l * hi[k];
    }
    RowGradient &gt = Slot(grads->entities, t.tail.value, d);
    for (std::size_t k = 0; k < d; ++k) {
      gt.re[k] += dscore * (rr[k] * hr[k] - ri[k] * hi[k]) + two_l * tr[k];
      gt.im[k] += dscore * (rr[k] * hi[k] + ri[k] * hr[k]) + two_l * ti[k];
    }
    RowGradient &gr = Slot(grads->relations, t.relation.value, d);
    for (std::size_t k = 0; k < d; ++k) {
      gr.re[k] += dscore * (hr[k] * tr[k] + hi[k] * ti[k]) + two_l * rr[k];
      gr.im[k] += dscore * (hr[k] * ti[k] - hi[k] * tr[k]) + two_l * ri[k];
    }
  }
  return loss;
}

void ApplySgd(std::span<double> row, const std::vector<double> &grad, double lr) {
  for (std::size_t k = 0; k < row.size(); ++k) row[k] -= lr * grad[k];
}

}  // namespace

ComplExModel::ComplExModel(std::size_t n_entities, std::size_t n_relations, std::size_t dim)
    : n_entities_(n_entities),
      n_relations_(n_relations),
      dim_(dim),
      entity_re_(n_entities * dim, 0.0),
      entity_im_(n_entities * dim, 0.0),
      relation_re_(n_relations * dim, 0.0),
      relation_im_(n_relations * dim, 0.0) {}

bool ComplExModel::all_finite() const {
  auto finite = [](const std::vector<double> &t) {
    return std::all_of(t.begin(), t.end(), [](double v) { return std::isfinite(v); });
  };
  return finite(entity_re_) && finite(entity_im_) && finite(relation_re_) && finite(relation_im_);
}

RowGradient &ComplExGradients::entity(EntityId e) { return Slot(entities, e.value, dim); }
RowGradient &ComplExGradients::relation(RelationId r) { return Slot(relations, r.value, dim); }

ComplExModel InitModel(std::size_t n_entities, std::size_t n_relations, const KgTrainConfig &config) {
  if (n_entities == 0 || n_relations == 0) Fail(ErrorKind::kInvalidArgument, "embedding model needs entities and relations");
  if (config.dim == 0) Fail(ErrorKind::kInvalidArgument, "embedding dimension must be positive");
  ComplExModel model(n_entities, n_relations, config.dim);
  Rng rng(config.seed, /*stream=*/0x6b67);
  const double bound = 0.5 / std::sqrt(static_cast<double>(config.dim));
  for (auto *table : {&model.entity_re_table(), &model.entity_im_table(), &model.relation_re_table(),
                      &model.relation_im_table()}) {
    for (double &v : *table) v = rng.uniform(-bound, bound);
  }
  return model;
}

double Score(const ComplExModel &model, EntityId head, RelationId relation, EntityId tail) {
  if (!model.valid(head) || !model.valid(tail) || !model.valid(relation)) {
    Fail(ErrorKind::kInvalidArgument, "score: id out of range");
  }
  auto hr = model.entity_re(head), hi = model.entity_im(head);
  auto tr = model.entity_re(tail), ti = model.entity_im(tail);
  auto rr = model.relation_re(relation), ri = model.relation_im(relation);
  double s = 0.0;
  for (std::size_t k = 0; k < model.dim(); ++k) {
    s += rr[k] * hr[k] * tr[k] + rr[k] * hi[k] * ti[k] + ri[k] * hr[k] * ti[k] - ri[k] * hi[k] * tr[k];
  }
  return s;
}

double LogisticLoss(const ComplExModel &model, std::span<const LabeledTriple> batch, double l2_lambda) {
  return LossAndGradients(model, batch, l2_lambda, nullptr);
}

ComplExGradients Gradients(const ComplExModel &model, std::span<const LabeledTriple> batch, double l2_lambda) {
  ComplExGradients grads;
  LossAndGradients(model, batch, l2_lambda, &grads);
  return grads;
}

std::vector<Triple> NegativeSample(const TripleStore &store, const Triple &positive, std::size_t k, Rng &rng) {
  if (k == 0) Fail(ErrorKind::kInvalidArgument, "negative sample count must be positive");
  const std::size_t n = store.num_entities();
  std::vector<Triple> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const bool corrupt_head = rng.coin();
    Triple candidate = positive;
    for (int attempt = 0; attempt <= kMaxResample; ++attempt) {
      candidate = positive;
      EntityId replacement{static_cast<std::uint32_t>(rng.index(n))};
      (corrupt_head ? candidate.head : candidate.tail) = replacement;
      if (!store.contains(candidate)) break;
    }
    out.push_back(candidate);
  }
  return out;
}

KgTrainResult Train(ComplExModel &model, const TripleStore &store, std::span<const Triple> positives,
                    const KgTrainConfig &config) {
  if (positives.empty()) Fail(ErrorKind::kInvalidArgument, "no training triples");
  if (model.num_entities() != store.num_entities() || model.num_relations() != store.num_relations()) {
    Fail(ErrorKind::kInvalidArgument, "embedding model shape does not match the triple store");
  }
  if (config.batch_size == 0) Fail(ErrorKind::kInvalidArgument, "batch size must be positive");

  Rng shuffle_rng(config.seed, /*stream=*/1);
  Rng negative_rng(config.seed, /*stream=*/2);
  std::vector<std::size_t> order(positives.size());
  std::iota(order.begin(), order.end(), 0);

  KgTrainResult result;
  std::vector<LabeledTriple> batch;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    std::size_t examples = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) {
        const Triple &pos = positives[order[i]];
        batch.push_back({pos, +1});
        for (const Triple &neg : NegativeSample(store, pos, config.negatives_per_positive, negative_rng)) {
          batch.push_back({neg, -1});
        }
      }
      ComplExGradients grads;
      const double loss = LossAndGradients(model, batch, config.l2_lambda, &grads);
      if (!std::isfinite(loss)) {
        Fail(ErrorKind::kNumeric, "embedding training diverged: non-finite loss at epoch " +
                                      std::to_string(epoch + 1) + ", batch starting at positive " +
                                      std::to_string(start) + "; lower learning_rate");
      }
      epoch_loss += loss;
      examples += batch.size();
      for (auto &[id, g] : grads.entities) {
        ApplySgd(model.entity_re(EntityId{id}), g.re, config.learning_rate);
        ApplySgd(model.entity_im(EntityId{id}), g.im, config.learning_rate);
      }
      for (auto &[id, g] : grads.relations) {
        ApplySgd(model.relation_re(RelationId{id}), g.re, config.learning_rate);
        ApplySgd(model.relation_im(RelationId{id}), g.im, config.learning_rate);
      }
    }
    result.epoch_loss.push_back(epoch_loss / static_cast<double>(examples));
  }
  if (!model.all_finite()) Fail(ErrorKind::kNumeric, "embedding tables contain non-finite values after training");
  return result;
}

KgTrainResult Train(ComplExModel &model, const TripleStore &store, const KgTrainConfig &config) {
  return Train(model, store, store.triples(), config);
}

LinkPredMetrics EvaluateLinkPrediction(const ComplExModel &model, std::span<const Triple> test,
                                       const TripleStore &store) {
  if (test.empty()) Fail(ErrorKind::kInvalidArgument, "no test triples for link prediction");
  const std::size_t n = model.num_entities();
  const std::size_t d = model.dim();
  std::vector<double> scores(n);
  std::vector<double> a(d), b(d);

  // The score is linear in the free entity: s(e) = sum_k a_k re(e)_k + b_k im(e)_k.
  auto score_all = [&]() {
    for (std::size_t e = 0; e < n; ++e) {
      auto re = model.entity_re(EntityId{static_cast<std::uint32_t>(e)});
      auto im = model.entity_im(EntityId{static_cast<std::uint32_t>(e)});
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += a[k] * re[k] + b[k] * im[k];
      scores[e] = s;
    }
  };
  auto rank_of = [&](EntityId target, std::span<const EntityId> known) {
    const double ts = scores[target.value];
    std::size_t rank = 1;
    for (std::size_t e = 0; e < n; ++e) {
      if (e == target.value || scores[e] < ts) continue;
      EntityId id{static_cast<std::uint32_t>(e)};
      if (std::binary_search(known.begin(), known.end(), id)) continue;
      ++rank;
    }
    return rank;
  };

  double rr_sum = 0.0;
  std::map<int, double> hits{{1, 0.0}, {3, 0.0}, {10, 0.0}};
  auto record = [&](std::size_t rank) {
    rr_sum += 1.0 / static_cast<double>(rank);
    for (auto &[k, count] : hits) {
      if (rank <= static_cast<std::size_t>(k)) count += 1.0;
    }
  };

  for (const Triple &t : test) {
    CheckIds(model, t);
    auto hr = model.entity_re(t.head), hi = model.entity_im(t.head);
    auto tr = model.entity_re(t.tail), ti = model.entity_im(t.tail);
    auto rr = model.relation_re(t.relation), ri = model.relation_im(t.relation);

    for (std::size_t k = 0; k < d; ++k) {
      a[k] = rr[k] * hr[k] - ri[k] * hi[k];
      b[k] = rr[k] * hi[k] + ri[k] * hr[k];
    }
    score_all();
    record(rank_of(t.tail, store.tails(t.head, t.relation)));

    for (std::size_t k = 0; k < d; ++k) {
      a[k] = rr[k] * tr[k] + ri[k] * ti[k];
      b[k] = rr[k] * ti[k] - ri[k] * tr[k];
    }
    score_all();
    record(rank_of(t.head, store.heads(t.tail, t.relation)));
  }

  LinkPredMetrics metrics;
  metrics.n_queries = 2 * test.size();
  const double q = static_cast<double>(metrics.n_queries);
  metrics.mrr = rr_sum / q;
  for (auto &[k, count] : hits) metrics.hits_at[k] = count / q;
  return metrics;
}

std::string SerializeEmbeddings(const ComplExModel &model) {
  BinaryWriter w;
  w.magic(kMagic);
  w.u64(model.num_entities());
  w.u64(model.num_relations());
  w.u64(model.dim());
  w.f64s(model.entity_re_table());
  w.f64s(model.entity_im_table());
  w.f64s(model.relation_re_table());
  w.f64s(model.relation_im_table());
  return w.bytes();
}

void SaveEmbeddings(const ComplExModel &model, const std::string &path) {
  WriteFile(path, SerializeEmbeddings(model));
}

ComplExModel LoadEmbeddings(const std::string &path) {
  BinaryReader r = BinaryReader::open(path);
  r.expect_magic(kMagic);
  const std::uint64_t n_e = r.u64(), n_r = r.u64(), d = r.u64();
  if (n_e == 0 || n_r == 0 || d == 0) Fail(ErrorKind::kFormat, path + ": empty shape in header");
  // Guard the allocation against a corrupt header before sizing tables.
  const long double expected = 16.0L * static_cast<long double>(d) *
                               (static_cast<long double>(n_e) + static_cast<long double>(n_r));
  if (expected != static_cast<long double>(r.remaining())) {
    if (expected > static_cast<long double>(r.remaining())) {
      Fail(ErrorKind::kFormat, path + ": truncated file or header shape larger than table data");
    }
    r.expect_end();
  }
  ComplExModel model(n_e, n_r, d);
  r.f64s(model.entity_re_table());
  r.f64s(model.entity_im_table());
  r.f64s(model.relation_re_table());
  r.f64s(model.relation_im_table());
  r.expect_end();
  return model;
}

std::vector<double> EntityVector(const ComplExModel &model, EntityId e) {
  if (!model.valid(e)) Fail(ErrorKind::kInvalidArgument, "entity id " + std::to_string(e.value) + " out of range");
  std::vector<double> v;
  v.reserve(2 * model.dim());
  auto re = model.entity_re(e), im = model.entity_im(e);
  v.insert(v.end(), re.begin(), re.end());
  v.insert(v.end(), im.begin(), im.end());
  return v;
}

}  // namespace kgnews
