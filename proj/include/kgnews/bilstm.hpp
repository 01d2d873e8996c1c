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

#ifndef KGNEWS_BILSTM_HPP_
#define KGNEWS_BILSTM_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>

#include <Eigen/Dense>

#include "kgnews/random.hpp"
#include "kgnews/vocabulary.hpp"

namespace kgnews {

inline constexpr std::size_t kDefaultEmbedDim = 128;
inline constexpr std::size_t kDefaultHidden = 256;

// Gate rows are stacked [input; forget; candidate; output], H rows each.
struct LstmCellParams {
  Eigen::MatrixXd W;  // 4H x in
  Eigen::MatrixXd U;  // 4H x H
  Eigen::VectorXd b;  // 4H

  std::size_t hidden() const { return static_cast<std::size_t>(U.cols()); }
  std::size_t input_dim() const { return static_cast<std::size_t>(W.cols()); }
};

struct LstmCellCache {
  Eigen::VectorXd x, h_prev, c_prev;
  Eigen::VectorXd gates;  // post-activation i, f, g, o
  Eigen::VectorXd c;
};

struct LstmCellOutput {
  Eigen::VectorXd h;
  Eigen::VectorXd c;
  LstmCellCache cache;
};

struct LstmCellGrads {
  Eigen::MatrixXd dW, dU;
  Eigen::VectorXd db, dx, dh_prev, dc_prev;
};

LstmCellOutput LstmCell(const Eigen::VectorXd &x, const Eigen::VectorXd &h_prev, const Eigen::VectorXd &c_prev,
                        const LstmCellParams &params);
LstmCellGrads LstmCellBackward(const LstmCellCache &cache, const LstmCellParams &params, const Eigen::VectorXd &dh,
                               const Eigen::VectorXd &dc);

enum class Direction { kForward = 0, kBackward = 1 };

inline constexpr std::size_t CellIndex(std::size_t layer, Direction dir) {
  return 2 * layer + static_cast<std::size_t>(dir);
}

// Token embeddings plus a 2-layer stacked bidirectional LSTM.
struct BiLstmParams {
  Eigen::MatrixXd embedding;           // |V| x e
  std::array<LstmCellParams, 4> cells;  // indexed by CellIndex
  // Bumped on every in-place update so stale caches can be detected.
  std::uint64_t generation = 0;

  static BiLstmParams Init(std::size_t vocab_size, std::size_t embed_dim, std::size_t hidden, Rng &rng);

  LstmCellParams &cell(std::size_t layer, Direction dir) { return cells[CellIndex(layer, dir)]; }
  const LstmCellParams &cell(std::size_t layer, Direction dir) const { return cells[CellIndex(layer, dir)]; }

  std::size_t vocab_size() const { return static_cast<std::size_t>(embedding.rows()); }
  std::size_t embed_dim() const { return static_cast<std::size_t>(embedding.cols()); }
  std::size_t hidden() const { return cells[0].hidden(); }
  std::size_t output_dim() const { return 2 * hidden(); }
};

struct CellGradients {
  Eigen::MatrixXd dW, dU;
  Eigen::VectorXd db;
};

struct BiLstmGradients {
  std::map<std::int32_t, Eigen::VectorXd> embedding_rows;  // rows absent are zero
  std::array<CellGradients, 4> cells;

  static BiLstmGradients ZerosLike(const BiLstmParams &params);
  void SetZero();
  void Scale(double factor);
};

// One direction of one layer, in processing order.
struct DirectionCache {
  Eigen::MatrixXd inputs;  // in x T
  Eigen::MatrixXd gates;   // 4H x T
  Eigen::MatrixXd cells;   // H x T
  Eigen::MatrixXd hidden;  // H x T
};

struct EncoderCache {
  const BiLstmParams *source = nullptr;
  std::uint64_t generation = 0;
  std::vector<std::int32_t> tokens;  // real tokens only
  std::array<DirectionCache, 4> directions;
};

struct EncoderOutput {
  Eigen::VectorXd title_vector;  // [forward final of layer 2 || backward final of layer 2]
  EncoderCache cache;
};

// Padded positions are skipped; the recurrent state carries across them.
EncoderOutput Encode(const BiLstmParams &params, const TokenSequence &seq);

BiLstmGradients EncodeBackward(const BiLstmParams &params, const EncoderCache &cache,
                               const Eigen::VectorXd &upstream);
void AccumulateEncodeBackward(const BiLstmParams &params, const EncoderCache &cache, const Eigen::VectorXd &upstream,
                              BiLstmGradients &grads);

void ApplySgd(BiLstmParams &params, const BiLstmGradients &grads, double learning_rate);

// "BLSTM1" checkpoint.
std::string SerializeEncoder(const BiLstmParams &params);
void SaveEncoder(const BiLstmParams &params, const std::string &path);
BiLstmParams LoadEncoder(const std::string &path);

}  // namespace kgnews

#endif  // KGNEWS_BILSTM_HPP_
