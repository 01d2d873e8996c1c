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

#include "kgnews/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "kgnews/binary_io.hpp"
#include "kgnews/error.hpp"

namespace kgnews {
namespace {

constexpr char kMagic[] = "FUSE1";
constexpr double kProbClamp = 1e-12;

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double SafeRatio(double num, double den) { return den > 0 ? num / den : 0.0; }

// Mean taken as offset from the minimum with compensated summation: identical
// inputs come back exactly and input order has no visible effect.
template <typename Get>
double OffsetMean(std::size_t n, Get value) {
  double ref = value(0);
  for (std::size_t i = 1; i < n; ++i) ref = std::min(ref, value(i));
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = value(i) - ref;
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return ref + (sum + comp) / static_cast<double>(n);
}

}  // namespace

ClassifierParams ClassifierParams::Init(std::size_t input_dim, std::size_t hidden, Rng &rng) {
  if (input_dim == 0 || hidden == 0) Fail(ErrorKind::kInvalidArgument, "classifier sizes must be positive");
  const auto in = static_cast<Eigen::Index>(input_dim);
  const auto h = static_cast<Eigen::Index>(hidden);
  ClassifierParams p;
  const double b1 = std::sqrt(6.0 / static_cast<double>(input_dim + hidden));
  p.hidden_w.resize(h, in);
  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < in; ++c) p.hidden_w(r, c) = rng.uniform(-b1, b1);
  }
  p.hidden_b = Eigen::VectorXd::Zero(h);
  const double b2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
  p.out_w.resize(h);
  for (Eigen::Index r = 0; r < h; ++r) p.out_w(r) = rng.uniform(-b2, b2);
  p.out_b = 0.0;
  return p;
}

ClassifierGradients ClassifierGradients::ZerosLike(const ClassifierParams &params) {
  ClassifierGradients g;
  g.hidden_w = Eigen::MatrixXd::Zero(params.hidden_w.rows(), params.hidden_w.cols());
  g.hidden_b = Eigen::VectorXd::Zero(params.hidden_b.size());
  g.out_w = Eigen::VectorXd::Zero(params.out_w.size());
  return g;
}

void ClassifierGradients::SetZero() {
  hidden_w.setZero();
  hidden_b.setZero();
  out_w.setZero();
  out_b = 0.0;
}

void ClassifierGradients::Scale(double factor) {
  hidden_w *= factor;
  hidden_b *= factor;
  out_w *= factor;
  out_b *= factor;
}

Eigen::VectorXd AggregateEntities(std::span<const Eigen::VectorXd> vectors, std::size_t dim, bool allow_empty) {
  const auto d = static_cast<Eigen::Index>(dim);
  if (vectors.empty()) {
    if (!allow_empty) Fail(ErrorKind::kInvalidArgument, "no entity vectors to aggregate");
    return Eigen::VectorXd::Zero(d);
  }
  for (const auto &v : vectors) {
    if (v.size() != d) Fail(ErrorKind::kInvalidArgument, "entity vectors differ in length");
  }
  Eigen::VectorXd mean(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    mean(k) = OffsetMean(vectors.size(), [&](std::size_t i) { return vectors[i](k); });
  }
  return mean;
}

double Forward(const Eigen::VectorXd &title_vec, const Eigen::VectorXd &entity_vec, const ClassifierParams &params,
               FusionCache *cache) {
  if (static_cast<std::size_t>(title_vec.size() + entity_vec.size()) != params.input_dim()) {
    Fail(ErrorKind::kInvalidArgument, "fusion input width " + std::to_string(title_vec.size() + entity_vec.size()) +
                                          " does not match classifier input " + std::to_string(params.input_dim()));
  }
  Eigen::VectorXd input(title_vec.size() + entity_vec.size());
  input << title_vec, entity_vec;
  Eigen::VectorXd hidden = (params.hidden_w * input + params.hidden_b).array().tanh().matrix();
  const double p = Sigmoid(params.out_w.dot(hidden) + params.out_b);
  if (cache) {
    cache->input = std::move(input);
    cache->hidden = std::move(hidden);
    cache->probability = p;
  }
  return p;
}

Eigen::VectorXd ClassifierBackward(const FusionCache &cache, const ClassifierParams &params, double dlogit,
                                   ClassifierGradients &grads) {
  grads.out_w += dlogit * cache.hidden;
  grads.out_b += dlogit;
  const Eigen::VectorXd dpre = (dlogit * params.out_w.array() * (1.0 - cache.hidden.array().square())).matrix();
  grads.hidden_w.noalias() += dpre * cache.input.transpose();
  grads.hidden_b += dpre;
  return params.hidden_w.transpose() * dpre;
}

void ApplySgd(ClassifierParams &params, const ClassifierGradients &grads, double learning_rate) {
  params.hidden_w -= learning_rate * grads.hidden_w;
  params.hidden_b -= learning_rate * grads.hidden_b;
  params.out_w -= learning_rate * grads.out_w;
  params.out_b -= learning_rate * grads.out_b;
}

double BceLoss(double p, int label) {
  p = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
  return label == kFake ? -std::log(p) : -std::log1p(-p);
}

double BceGradient(double p, int label) {
  p = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
  return label == kFake ? -1.0 / p : 1.0 / (1.0 - p);
}

std::vector<Example> PrepareExamples(std::span<const NewsItem> items, const ComplExModel &kg,
                                     bool entity_encoder_enabled) {
  std::vector<Example> out;
  out.reserve(items.size());
  const std::size_t entity_dim = 2 * kg.dim();
  for (const NewsItem &item : items) {
    Example ex;
    ex.tokens = item.token_ids;
    ex.label = item.label;
    if (entity_encoder_enabled) {
      std::vector<Eigen::VectorXd> vectors;
      for (EntityId e : item.linked_entities) {
        std::vector<double> v = EntityVector(kg, e);
        vectors.emplace_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
      }
      if (vectors.empty()) Fail(ErrorKind::kInvalidArgument, "item " + item.id + " has no linked entities");
      ex.entity_vector = AggregateEntities(vectors, entity_dim);
    }
    out.push_back(std::move(ex));
  }
  return out;
}

DetectorModel InitDetector(std::size_t vocab_size, std::size_t entity_dim, const ModelShape &shape,
                           bool entity_encoder_enabled, std::uint64_t seed) {
  Rng encoder_rng(seed, /*stream=*/10);
  Rng classifier_rng(seed, /*stream=*/11);
  DetectorModel model;
  model.entity_encoder_enabled = entity_encoder_enabled;
  model.encoder = BiLstmParams::Init(vocab_size, shape.embed_dim, shape.hidden, encoder_rng);
  const std::size_t input = 2 * shape.hidden + (entity_encoder_enabled ? entity_dim : 0);
  model.classifier = ClassifierParams::Init(input, shape.classifier_hidden, classifier_rng);
  return model;
}

double PredictProbability(const DetectorModel &model, const Example &example) {
  EncoderOutput enc = Encode(model.encoder, example.tokens);
  return Forward(enc.title_vector, example.entity_vector, model.classifier);
}

TrainHistory TrainDetector(DetectorModel &model, std::span<const Example> train, const TrainProtocol &protocol,
                           std::uint64_t seed) {
  if (train.empty()) Fail(ErrorKind::kInvalidArgument, "empty training split");
  if (protocol.batch_size == 0 || protocol.patience == 0) {
    Fail(ErrorKind::kInvalidArgument, "batch size and patience must be positive");
  }
  Rng shuffle_rng(seed, /*stream=*/12);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> item_loss(train.size());

  BiLstmGradients encoder_grads = BiLstmGradients::ZerosLike(model.encoder);
  ClassifierGradients classifier_grads = ClassifierGradients::ZerosLike(model.classifier);
  const Eigen::Index title_dim = static_cast<Eigen::Index>(model.encoder.output_dim());

  TrainHistory history;
  double best_loss = std::numeric_limits<double>::infinity();
  DetectorModel best = model;
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= protocol.max_epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += protocol.batch_size) {
      const std::size_t stop = std::min(order.size(), start + protocol.batch_size);
      encoder_grads.SetZero();
      classifier_grads.SetZero();
      for (std::size_t k = start; k < stop; ++k) {
        const Example &ex = train[order[k]];
        EncoderOutput enc = Encode(model.encoder, ex.tokens);
        FusionCache cache;
        const double p = Forward(enc.title_vector, ex.entity_vector, model.classifier, &cache);
        item_loss[order[k]] = BceLoss(p, ex.label);
        if ((p >= kDecisionThreshold ? kFake : kTrue) == ex.label) ++correct;
        const double dlogit = p - static_cast<double>(ex.label);
        Eigen::VectorXd dinput = ClassifierBackward(cache, model.classifier, dlogit, classifier_grads);
        AccumulateEncodeBackward(model.encoder, enc.cache, dinput.head(title_dim), encoder_grads);
      }
      const double scale = 1.0 / static_cast<double>(stop - start);
      encoder_grads.Scale(scale);
      classifier_grads.Scale(scale);
      ApplySgd(model.encoder, encoder_grads, protocol.learning_rate);
      ApplySgd(model.classifier, classifier_grads, protocol.learning_rate);
    }
    // Summed in item order so the value does not depend on the shuffle.
    double loss = 0.0;
    for (double l : item_loss) loss += l;
    loss /= static_cast<double>(train.size());
    if (!std::isfinite(loss)) {
      Fail(ErrorKind::kNumeric, "detector training diverged: non-finite loss at epoch " + std::to_string(epoch));
    }
    history.epoch_loss.push_back(loss);
    history.epoch_accuracy.push_back(static_cast<double>(correct) / static_cast<double>(train.size()));

    if (loss < best_loss) {
      best_loss = loss;
      best = model;
      history.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= protocol.patience) {
      history.stopped_early = true;
      break;
    }
  }
  const std::uint64_t generation = model.encoder.generation;
  model = std::move(best);
  model.encoder.generation = generation + 1;
  return history;
}

EvalReport EvaluatePredictions(std::span<const int> predicted, std::span<const int> labels) {
  if (predicted.size() != labels.size() || labels.empty()) {
    Fail(ErrorKind::kInvalidArgument, "predictions and labels must be nonempty and equal in length");
  }
  EvalReport r;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if ((labels[i] != 0 && labels[i] != 1) || (predicted[i] != 0 && predicted[i] != 1)) {
      Fail(ErrorKind::kInvalidArgument, "labels must be 0 or 1");
    }
    ++r.confusion[labels[i]][predicted[i]];
  }
  const double total = static_cast<double>(labels.size());
  r.accuracy = static_cast<double>(r.confusion[0][0] + r.confusion[1][1]) / total;
  for (int c = 0; c < 2; ++c) {
    const double tp = static_cast<double>(r.confusion[c][c]);
    const double fp = static_cast<double>(r.confusion[1 - c][c]);
    const double fn = static_cast<double>(r.confusion[c][1 - c]);
    r.precision[c] = SafeRatio(tp, tp + fp);
    r.recall[c] = SafeRatio(tp, tp + fn);
    r.f1[c] = SafeRatio(2.0 * tp, 2.0 * tp + fp + fn);
  }
  r.f1_macro = (r.f1[0] + r.f1[1]) / 2.0;
  return r;
}

EvalReport Evaluate(const DetectorModel &model, std::span<const Example> test) {
  std::vector<int> predicted, labels;
  predicted.reserve(test.size());
  labels.reserve(test.size());
  for (const Example &ex : test) {
    predicted.push_back(PredictProbability(model, ex) >= kDecisionThreshold ? kFake : kTrue);
    labels.push_back(ex.label);
  }
  return EvaluatePredictions(predicted, labels);
}

TrialsReport RunTrials(std::span<const Example> train, std::span<const Example> test, std::size_t vocab_size,
                       std::size_t entity_dim, const ModelShape &shape, const TrainProtocol &protocol,
                       const ModelSink &on_model) {
  if (protocol.seeds.empty()) Fail(ErrorKind::kInvalidArgument, "no trial seeds configured");
  if (test.empty()) Fail(ErrorKind::kInvalidArgument, "empty test split");
  TrialsReport report;
  report.entity_encoder_enabled = protocol.entity_encoder_enabled;
  report.seeds = protocol.seeds;
  for (std::uint64_t seed : protocol.seeds) {
    DetectorModel model = InitDetector(vocab_size, entity_dim, shape, protocol.entity_encoder_enabled, seed);
    report.histories.push_back(TrainDetector(model, train, protocol, seed));
    report.per_seed.push_back(Evaluate(model, test));
    if (on_model) on_model(seed, model);
  }
  const auto &runs = report.per_seed;
  report.mean_f1_macro = OffsetMean(runs.size(), [&](std::size_t i) { return runs[i].f1_macro; });
  report.mean_accuracy = OffsetMean(runs.size(), [&](std::size_t i) { return runs[i].accuracy; });
  return report;
}

nlohmann::ordered_json EvalReportJson(const EvalReport &r) {
  nlohmann::ordered_json j;
  j["f1_macro"] = r.f1_macro;
  j["accuracy"] = r.accuracy;
  j["confusion"] = {{r.confusion[0][0], r.confusion[0][1]}, {r.confusion[1][0], r.confusion[1][1]}};
  nlohmann::ordered_json per_class;
  const char *names[2] = {"true", "fake"};
  for (int c = 0; c < 2; ++c) {
    per_class[names[c]] = {{"precision", r.precision[c]}, {"recall", r.recall[c]}, {"f1", r.f1[c]}};
  }
  j["per_class"] = std::move(per_class);
  return j;
}

nlohmann::ordered_json TrialsReportJson(const TrialsReport &report, const std::string &dataset) {
  nlohmann::ordered_json j;
  j["dataset"] = dataset;
  j["entity_encoder_enabled"] = report.entity_encoder_enabled;
  j["seeds"] = report.seeds;
  nlohmann::ordered_json per_seed = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < report.per_seed.size(); ++i) {
    nlohmann::ordered_json row = EvalReportJson(report.per_seed[i]);
    row["epochs"] = report.histories[i].epoch_loss.size();
    row["best_epoch"] = report.histories[i].best_epoch;
    per_seed.push_back(std::move(row));
  }
  j["per_seed"] = std::move(per_seed);
  j["mean"] = {{"f1_macro", report.mean_f1_macro}, {"accuracy", report.mean_accuracy}};
  return j;
}

void SaveClassifier(const ClassifierParams &params, const std::string &path) {
  BinaryWriter w;
  w.magic(kMagic);
  w.u64(params.input_dim());
  w.u64(params.hidden());
  for (Eigen::Index r = 0; r < params.hidden_w.rows(); ++r) {
    for (Eigen::Index c = 0; c < params.hidden_w.cols(); ++c) w.f64(params.hidden_w(r, c));
  }
  for (Eigen::Index r = 0; r < params.hidden_b.size(); ++r) w.f64(params.hidden_b(r));
  for (Eigen::Index r = 0; r < params.out_w.size(); ++r) w.f64(params.out_w(r));
  w.f64(params.out_b);
  w.save(path);
}

ClassifierParams LoadClassifier(const std::string &path) {
  BinaryReader r = BinaryReader::open(path);
  r.expect_magic(kMagic);
  const std::uint64_t in = r.u64(), hidden = r.u64();
  if (in == 0 || hidden == 0) Fail(ErrorKind::kFormat, path + ": empty classifier shape");
  if (8.0L * (static_cast<long double>(in) * hidden + 2.0L * hidden + 1) != static_cast<long double>(r.remaining())) {
    Fail(ErrorKind::kFormat, path + ": header shape does not match table data (truncated or corrupt)");
  }
  ClassifierParams p;
  const auto h = static_cast<Eigen::Index>(hidden);
  const auto n = static_cast<Eigen::Index>(in);
  p.hidden_w.resize(h, n);
  for (Eigen::Index i = 0; i < h; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) p.hidden_w(i, j) = r.f64();
  }
  p.hidden_b.resize(h);
  for (Eigen::Index i = 0; i < h; ++i) p.hidden_b(i) = r.f64();
  p.out_w.resize(h);
  for (Eigen::Index i = 0; i < h; ++i) p.out_w(i) = r.f64();
  p.out_b = r.f64();
  r.expect_end();
  return p;
}

}  // namespace kgnews
