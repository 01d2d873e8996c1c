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

#ifndef KGNEWS_COMPLEX_EMBEDDING_HPP_
#define KGNEWS_COMPLEX_EMBEDDING_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "kgnews/kg_store.hpp"
#include "kgnews/random.hpp"

namespace kgnews {

struct KgTrainConfig {
  std::size_t dim = 64;
  double learning_rate = 0.05;
  double l2_lambda = 1e-4;
  std::size_t negatives_per_positive = 5;
  std::size_t epochs = 100;
  std::size_t batch_size = 512;
  std::uint64_t seed = 0;
};

// Complex-valued entity and relation embeddings, stored as separate real and
// imaginary row-major tables.
class ComplExModel {
 public:
  ComplExModel() = default;
  ComplExModel(std::size_t n_entities, std::size_t n_relations, std::size_t dim);

  std::size_t num_entities() const { return n_entities_; }
  std::size_t num_relations() const { return n_relations_; }
  std::size_t dim() const { return dim_; }

  std::span<double> entity_re(EntityId e) { return Row(entity_re_, e.value); }
  std::span<double> entity_im(EntityId e) { return Row(entity_im_, e.value); }
  std::span<double> relation_re(RelationId r) { return Row(relation_re_, r.value); }
  std::span<double> relation_im(RelationId r) { return Row(relation_im_, r.value); }
  std::span<const double> entity_re(EntityId e) const { return Row(entity_re_, e.value); }
  std::span<const double> entity_im(EntityId e) const { return Row(entity_im_, e.value); }
  std::span<const double> relation_re(RelationId r) const { return Row(relation_re_, r.value); }
  std::span<const double> relation_im(RelationId r) const { return Row(relation_im_, r.value); }

  // Whole tables in the order they are serialized.
  std::vector<double> &entity_re_table() { return entity_re_; }
  std::vector<double> &entity_im_table() { return entity_im_; }
  std::vector<double> &relation_re_table() { return relation_re_; }
  std::vector<double> &relation_im_table() { return relation_im_; }
  const std::vector<double> &entity_re_table() const { return entity_re_; }
  const std::vector<double> &entity_im_table() const { return entity_im_; }
  const std::vector<double> &relation_re_table() const { return relation_re_; }
  const std::vector<double> &relation_im_table() const { return relation_im_; }

  bool valid(EntityId e) const { return e.value < n_entities_; }
  bool valid(RelationId r) const { return r.value < n_relations_; }
  bool all_finite() const;

  bool operator==(const ComplExModel &) const = default;

 private:
  std::span<double> Row(std::vector<double> &t, std::size_t i) { return {t.data() + i * dim_, dim_}; }
  std::span<const double> Row(const std::vector<double> &t, std::size_t i) const {
    return {t.data() + i * dim_, dim_};
  }

  std::size_t n_entities_ = 0;
  std::size_t n_relations_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> entity_re_, entity_im_, relation_re_, relation_im_;
};

struct LabeledTriple {
  Triple triple;
  int label = 1;  // +1 observed, -1 corrupted
};

struct RowGradient {
  std::vector<double> re;
  std::vector<double> im;
};

// Gradients keyed by row id; rows absent from the map have zero gradient.
struct ComplExGradients {
  std::size_t dim = 0;
  std::map<std::uint32_t, RowGradient> entities;
  std::map<std::uint32_t, RowGradient> relations;

  RowGradient &entity(EntityId e);
  RowGradient &relation(RelationId r);
};

struct LinkPredMetrics {
  double mrr = 0.0;
  std::map<int, double> hits_at;  // keys 1, 3, 10
  std::size_t n_queries = 0;
};

ComplExModel InitModel(std::size_t n_entities, std::size_t n_relations, const KgTrainConfig &config);

// Re(<e_h, w_r, conj(e_t)>).
double Score(const ComplExModel &model, EntityId head, RelationId relation, EntityId tail);

// Sum over the batch of softplus(-y * score) plus, per example, l2_lambda
// times the squared norm of the three rows it touches.
double LogisticLoss(const ComplExModel &model, std::span<const LabeledTriple> batch, double l2_lambda);
ComplExGradients Gradients(const ComplExModel &model, std::span<const LabeledTriple> batch, double l2_lambda);

// k corruptions of the positive, replacing head or tail (fair coin) with a
// uniform entity. Known triples are redrawn up to 100 times.
std::vector<Triple> NegativeSample(const TripleStore &store, const Triple &positive, std::size_t k, Rng &rng);

struct KgTrainResult {
  std::vector<double> epoch_loss;  // mean per-example loss
};

// Minibatch SGD over the given positives; negatives are filtered against the
// full store.
KgTrainResult Train(ComplExModel &model, const TripleStore &store, std::span<const Triple> positives,
                    const KgTrainConfig &config);
KgTrainResult Train(ComplExModel &model, const TripleStore &store, const KgTrainConfig &config);

// Filtered ranking in both directions with pessimistic ties.
LinkPredMetrics EvaluateLinkPrediction(const ComplExModel &model, std::span<const Triple> test,
                                       const TripleStore &store);

void SaveEmbeddings(const ComplExModel &model, const std::string &path);
std::string SerializeEmbeddings(const ComplExModel &model);
ComplExModel LoadEmbeddings(const std::string &path);

// [re || im], length 2d.
std::vector<double> EntityVector(const ComplExModel &model, EntityId e);

}  // namespace kgnews

#endif  // KGNEWS_COMPLEX_EMBEDDING_HPP_
