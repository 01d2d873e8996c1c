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

#ifndef KGNEWS_CLASSIFIER_HPP_
#define KGNEWS_CLASSIFIER_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "kgnews/bilstm.hpp"
#include "kgnews/complex_embedding.hpp"
#include "kgnews/dataset.hpp"
#include "kgnews/random.hpp"

namespace kgnews {

inline constexpr std::size_t kDefaultClassifierHidden = 256;
inline constexpr double kDecisionThreshold = 0.5;

// One tanh hidden layer over [title_vector || entity_vector], sigmoid output.
struct ClassifierParams {
  Eigen::MatrixXd hidden_w;  // hidden x in
  Eigen::VectorXd hidden_b;
  Eigen::VectorXd out_w;  // hidden
  double out_b = 0.0;

  // Glorot-uniform weights, zero biases.
  static ClassifierParams Init(std::size_t input_dim, std::size_t hidden, Rng &rng);
  std::size_t input_dim() const { return static_cast<std::size_t>(hidden_w.cols()); }
  std::size_t hidden() const { return static_cast<std::size_t>(hidden_w.rows()); }
};

struct ClassifierGradients {
  Eigen::MatrixXd hidden_w;
  Eigen::VectorXd hidden_b;
  Eigen::VectorXd out_w;
  double out_b = 0.0;

  static ClassifierGradients ZerosLike(const ClassifierParams &params);
  void SetZero();
  void Scale(double factor);
};

struct FusionCache {
  Eigen::VectorXd input;
  Eigen::VectorXd hidden;
  double probability = 0.5;
};

// Elementwise mean. Empty input yields zeros only when allow_empty is set
// (entity encoder disabled).
Eigen::VectorXd AggregateEntities(std::span<const Eigen::VectorXd> vectors, std::size_t dim, bool allow_empty = false);

// entity_vec is empty when the entity encoder is disabled.
double Forward(const Eigen::VectorXd &title_vec, const Eigen::VectorXd &entity_vec, const ClassifierParams &params,
               FusionCache *cache = nullptr);

// Accumulates parameter gradients for dL/dlogit and returns dL/dinput.
Eigen::VectorXd ClassifierBackward(const FusionCache &cache, const ClassifierParams &params, double dlogit,
                                   ClassifierGradients &grads);

void ApplySgd(ClassifierParams &params, const ClassifierGradients &grads, double learning_rate);

// Binary cross-entropy on p clamped to [1e-12, 1 - 1e-12].
double BceLoss(double p, int label);
double BceGradient(double p, int label);  // dL/dp

struct TrainProtocol {
  std::size_t batch_size = 32;
  std::size_t max_epochs = 100;
  std::size_t patience = 2;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  double split_ratio = 0.8;
  bool entity_encoder_enabled = true;
  double learning_rate = 0.05;
};

struct ModelShape {
  std::size_t embed_dim = kDefaultEmbedDim;
  std::size_t hidden = kDefaultHidden;
  std::size_t classifier_hidden = kDefaultClassifierHidden;
};

struct DetectorModel {
  BiLstmParams encoder;
  ClassifierParams classifier;
  bool entity_encoder_enabled = true;
};

// Token ids plus the frozen, pre-aggregated entity vector.
struct Example {
  TokenSequence tokens;
  Eigen::VectorXd entity_vector;  // empty when the entity encoder is disabled
  int label = kTrue;
};

// Items must already carry token ids; entity vectors come from the frozen KG
// embeddings.
std::vector<Example> PrepareExamples(std::span<const NewsItem> items, const ComplExModel &kg, bool entity_encoder_enabled);

// Separate generator streams for encoder init, classifier init and shuffling,
// so the title path is identical whether or not the entity encoder is on.
DetectorModel InitDetector(std::size_t vocab_size, std::size_t entity_dim, const ModelShape &shape,
                           bool entity_encoder_enabled, std::uint64_t seed);

double PredictProbability(const DetectorModel &model, const Example &example);

struct TrainHistory {
  std::vector<double> epoch_loss;
  std::vector<double> epoch_accuracy;  // running accuracy during each epoch
  std::size_t best_epoch = 0;          // 1-based
  bool stopped_early = false;
};

// Minibatch SGD on the mean batch loss. Stops once the epoch training loss
// fails to improve for protocol.patience consecutive epochs and restores the
// best-loss parameters.
TrainHistory TrainDetector(DetectorModel &model, std::span<const Example> train, const TrainProtocol &protocol,
                           std::uint64_t seed);

struct EvalReport {
  std::array<std::array<std::size_t, 2>, 2> confusion{};  // [[tn, fp], [fn, tp]]
  double accuracy = 0.0;
  std::array<double, 2> precision{};  // index = class label
  std::array<double, 2> recall{};
  std::array<double, 2> f1{};
  double f1_macro = 0.0;

  bool operator==(const EvalReport &) const = default;
};

EvalReport EvaluatePredictions(std::span<const int> predicted, std::span<const int> labels);
EvalReport Evaluate(const DetectorModel &model, std::span<const Example> test);

struct TrialsReport {
  bool entity_encoder_enabled = true;
  std::vector<std::uint64_t> seeds;
  std::vector<EvalReport> per_seed;
  std::vector<TrainHistory> histories;
  double mean_f1_macro = 0.0;
  double mean_accuracy = 0.0;
};

// on_model, when set, sees each trained model before it is discarded.
using ModelSink = std::function<void(std::uint64_t seed, const DetectorModel &model)>;

TrialsReport RunTrials(std::span<const Example> train, std::span<const Example> test, std::size_t vocab_size,
                       std::size_t entity_dim, const ModelShape &shape, const TrainProtocol &protocol,
                       const ModelSink &on_model = {});

nlohmann::ordered_json EvalReportJson(const EvalReport &report);
nlohmann::ordered_json TrialsReportJson(const TrialsReport &report, const std::string &dataset);

// "FUSE1" checkpoint for the fusion MLP.
void SaveClassifier(const ClassifierParams &params, const std::string &path);
ClassifierParams LoadClassifier(const std::string &path);

}  // namespace kgnews

#endif  // KGNEWS_CLASSIFIER_HPP_
