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

#include "kgnews/bilstm.hpp"

#include <cmath>

#include "kgnews/binary_io.hpp"
#include "kgnews/error.hpp"

namespace kgnews {
namespace {

constexpr char kMagic[] = "BLSTM1";
constexpr std::size_t kLayers = 2;

Eigen::ArrayXd Sigmoid(const Eigen::ArrayXd &z) { return (1.0 + (-z).exp()).inverse(); }

// Activates preactivations z (4H) in place.
void ActivateGates(Eigen::Ref<Eigen::VectorXd> z, Eigen::Index H) {
  z.segment(0, 2 * H) = Sigmoid(z.segment(0, 2 * H).array()).matrix();
  z.segment(2 * H, H) = z.segment(2 * H, H).array().tanh().matrix();
  z.segment(3 * H, H) = Sigmoid(z.segment(3 * H, H).array()).matrix();
}

void CheckCell(const LstmCellParams &p, Eigen::Index in) {
  const Eigen::Index H = p.U.cols();
  if (p.U.rows() != 4 * H || p.W.rows() != 4 * H || p.b.size() != 4 * H || p.W.cols() != in) {
    Fail(ErrorKind::kInvalidArgument, "LSTM cell dimension mismatch");
  }
}

DirectionCache RunDirection(const LstmCellParams &p, Eigen::MatrixXd inputs) {
  const Eigen::Index H = p.U.cols();
  const Eigen::Index T = inputs.cols();
  DirectionCache cache;
  cache.gates.resize(4 * H, T);
  cache.cells.resize(H, T);
  cache.hidden.resize(H, T);
  if (T > 0) {
    cache.gates.noalias() = p.W * inputs;
    cache.gates.colwise() += p.b;
  }
  Eigen::VectorXd h = Eigen::VectorXd::Zero(H);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(H);
  for (Eigen::Index t = 0; t < T; ++t) {
    auto z = cache.gates.col(t);
    z.noalias() += p.U * h;
    ActivateGates(z, H);
    c = z.segment(H, H).cwiseProduct(c) + z.segment(0, H).cwiseProduct(z.segment(2 * H, H));
    h = z.segment(3 * H, H).cwiseProduct(c.array().tanh().matrix());
    cache.cells.col(t) = c;
    cache.hidden.col(t) = h;
  }
  cache.inputs = std::move(inputs);
  return cache;
}

// Backpropagates dh_external (H x T, processing order) through one direction.
// Accumulates parameter gradients and returns the gradient wrt the inputs.
Eigen::MatrixXd BackpropDirection(const LstmCellParams &p, const DirectionCache &cache,
                                  const Eigen::MatrixXd &dh_external, CellGradients &grads) {
  const Eigen::Index H = p.U.cols();
  const Eigen::Index T = cache.hidden.cols();
  Eigen::MatrixXd dz(4 * H, T);
  Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(H);
  Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(H);
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    const auto gates = cache.gates.col(t).array();
    const auto i = gates.segment(0, H), f = gates.segment(H, H), g = gates.segment(2 * H, H),
               o = gates.segment(3 * H, H);
    const Eigen::ArrayXd tc = cache.cells.col(t).array().tanh();
    Eigen::ArrayXd c_prev = Eigen::ArrayXd::Zero(H);
    if (t > 0) c_prev = cache.cells.col(t - 1).array();
    const Eigen::ArrayXd dh = dh_external.col(t).array() + dh_next.array();
    const Eigen::ArrayXd dc = dc_next.array() + dh * o * (1.0 - tc.square());
    auto col = dz.col(t).array();
    col.segment(0, H) = dc * g * i * (1.0 - i);
    col.segment(H, H) = dc * c_prev * f * (1.0 - f);
    col.segment(2 * H, H) = dc * i * (1.0 - g.square());
    col.segment(3 * H, H) = dh * tc * o * (1.0 - o);
    dc_next = (dc * f).matrix();
    dh_next.noalias() = p.U.transpose() * dz.col(t);
  }
  if (T > 0) {
    grads.dW.noalias() += dz * cache.inputs.transpose();
    if (T > 1) grads.dU.noalias() += dz.rightCols(T - 1) * cache.hidden.leftCols(T - 1).transpose();
    grads.db += dz.rowwise().sum();
  }
  return p.W.transpose() * dz;
}

Eigen::MatrixXd Reversed(const Eigen::MatrixXd &m) { return m.rowwise().reverse(); }

void WriteRowMajor(BinaryWriter &w, const Eigen::MatrixXd &m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) w.f64(m(r, c));
  }
}

void ReadRowMajor(BinaryReader &r, Eigen::MatrixXd &m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = r.f64();
  }
}

}  // namespace

LstmCellOutput LstmCell(const Eigen::VectorXd &x, const Eigen::VectorXd &h_prev, const Eigen::VectorXd &c_prev,
                        const LstmCellParams &params) {
  CheckCell(params, x.size());
  const Eigen::Index H = params.U.cols();
  if (h_prev.size() != H || c_prev.size() != H) Fail(ErrorKind::kInvalidArgument, "LSTM state dimension mismatch");
  LstmCellOutput out;
  Eigen::VectorXd z = params.W * x + params.U * h_prev + params.b;
  ActivateGates(z, H);
  out.c = z.segment(H, H).cwiseProduct(c_prev) + z.segment(0, H).cwiseProduct(z.segment(2 * H, H));
  out.h = z.segment(3 * H, H).cwiseProduct(out.c.array().tanh().matrix());
  out.cache = {x, h_prev, c_prev, std::move(z), out.c};
  return out;
}

LstmCellGrads LstmCellBackward(const LstmCellCache &cache, const LstmCellParams &params, const Eigen::VectorXd &dh,
                               const Eigen::VectorXd &dc) {
  const Eigen::Index H = params.U.cols();
  const auto gates = cache.gates.array();
  const auto i = gates.segment(0, H), f = gates.segment(H, H), g = gates.segment(2 * H, H),
             o = gates.segment(3 * H, H);
  const Eigen::ArrayXd tc = cache.c.array().tanh();
  const Eigen::ArrayXd dct = dc.array() + dh.array() * o * (1.0 - tc.square());
  Eigen::VectorXd dz(4 * H);
  dz.segment(0, H) = (dct * g * i * (1.0 - i)).matrix();
  dz.segment(H, H) = (dct * cache.c_prev.array() * f * (1.0 - f)).matrix();
  dz.segment(2 * H, H) = (dct * i * (1.0 - g.square())).matrix();
  dz.segment(3 * H, H) = (dh.array() * tc * o * (1.0 - o)).matrix();
  LstmCellGrads grads;
  grads.dW = dz * cache.x.transpose();
  grads.dU = dz * cache.h_prev.transpose();
  grads.db = dz;
  grads.dx = params.W.transpose() * dz;
  grads.dh_prev = params.U.transpose() * dz;
  grads.dc_prev = (dct * f).matrix();
  return grads;
}

BiLstmParams BiLstmParams::Init(std::size_t vocab_size, std::size_t embed_dim, std::size_t hidden, Rng &rng) {
  if (vocab_size == 0 || embed_dim == 0 || hidden == 0) {
    Fail(ErrorKind::kInvalidArgument, "encoder sizes must be positive");
  }
  const auto V = static_cast<Eigen::Index>(vocab_size);
  const auto E = static_cast<Eigen::Index>(embed_dim);
  const auto H = static_cast<Eigen::Index>(hidden);
  BiLstmParams p;
  p.embedding.resize(V, E);
  for (Eigen::Index r = 0; r < V; ++r) {
    for (Eigen::Index c = 0; c < E; ++c) p.embedding(r, c) = rng.uniform(-0.05, 0.05);
  }
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (std::size_t layer = 0; layer < kLayers; ++layer) {
    for (Direction dir : {Direction::kForward, Direction::kBackward}) {
      LstmCellParams &cell = p.cell(layer, dir);
      const Eigen::Index in = layer == 0 ? E : 2 * H;
      cell.W.resize(4 * H, in);
      cell.U.resize(4 * H, H);
      for (Eigen::Index r = 0; r < 4 * H; ++r) {
        for (Eigen::Index c = 0; c < in; ++c) cell.W(r, c) = rng.uniform(-bound, bound);
      }
      for (Eigen::Index r = 0; r < 4 * H; ++r) {
        for (Eigen::Index c = 0; c < H; ++c) cell.U(r, c) = rng.uniform(-bound, bound);
      }
      cell.b = Eigen::VectorXd::Zero(4 * H);
      cell.b.segment(H, H).setOnes();
    }
  }
  return p;
}

BiLstmGradients BiLstmGradients::ZerosLike(const BiLstmParams &params) {
  BiLstmGradients g;
  for (std::size_t k = 0; k < 4; ++k) {
    const LstmCellParams &c = params.cells[k];
    g.cells[k].dW = Eigen::MatrixXd::Zero(c.W.rows(), c.W.cols());
    g.cells[k].dU = Eigen::MatrixXd::Zero(c.U.rows(), c.U.cols());
    g.cells[k].db = Eigen::VectorXd::Zero(c.b.size());
  }
  return g;
}

void BiLstmGradients::SetZero() {
  embedding_rows.clear();
  for (auto &c : cells) {
    c.dW.setZero();
    c.dU.setZero();
    c.db.setZero();
  }
}

void BiLstmGradients::Scale(double factor) {
  for (auto &[id, row] : embedding_rows) row *= factor;
  for (auto &c : cells) {
    c.dW *= factor;
    c.dU *= factor;
    c.db *= factor;
  }
}

EncoderOutput Encode(const BiLstmParams &params, const TokenSequence &seq) {
  if (seq.ids.size() != seq.mask.size()) Fail(ErrorKind::kInvalidArgument, "token ids and mask differ in length");
  const Eigen::Index E = params.embedding.cols();
  const Eigen::Index H = static_cast<Eigen::Index>(params.hidden());
  CheckCell(params.cells[0], E);
  CheckCell(params.cells[1], E);
  CheckCell(params.cells[2], 2 * H);
  CheckCell(params.cells[3], 2 * H);

  EncoderOutput out;
  EncoderCache &cache = out.cache;
  cache.source = &params;
  cache.generation = params.generation;
  for (std::size_t i = 0; i < seq.ids.size(); ++i) {
    if (!seq.mask[i]) continue;
    const std::int32_t id = seq.ids[i];
    if (id < 0 || static_cast<std::size_t>(id) >= params.vocab_size()) {
      Fail(ErrorKind::kInvalidArgument, "token id " + std::to_string(id) + " outside the embedding table");
    }
    cache.tokens.push_back(id);
  }
  const auto T = static_cast<Eigen::Index>(cache.tokens.size());

  Eigen::MatrixXd x1(E, T);
  for (Eigen::Index t = 0; t < T; ++t) x1.col(t) = params.embedding.row(cache.tokens[t]).transpose();

  Eigen::MatrixXd layer_input = std::move(x1);
  for (std::size_t layer = 0; layer < kLayers; ++layer) {
    DirectionCache &fwd = cache.directions[CellIndex(layer, Direction::kForward)];
    DirectionCache &bwd = cache.directions[CellIndex(layer, Direction::kBackward)];
    fwd = RunDirection(params.cell(layer, Direction::kForward), layer_input);
    bwd = RunDirection(params.cell(layer, Direction::kBackward), Reversed(layer_input));
    if (layer + 1 < kLayers) {
      layer_input.resize(2 * H, T);
      layer_input.topRows(H) = fwd.hidden;
      layer_input.bottomRows(H) = Reversed(bwd.hidden);
    }
  }

  out.title_vector = Eigen::VectorXd::Zero(2 * H);
  if (T > 0) {
    out.title_vector.head(H) = cache.directions[CellIndex(1, Direction::kForward)].hidden.col(T - 1);
    out.title_vector.tail(H) = cache.directions[CellIndex(1, Direction::kBackward)].hidden.col(T - 1);
  }
  return out;
}

void AccumulateEncodeBackward(const BiLstmParams &params, const EncoderCache &cache, const Eigen::VectorXd &upstream,
                              BiLstmGradients &grads) {
  if (cache.source == nullptr) Fail(ErrorKind::kInvalidArgument, "missing encoder cache");
  if (cache.source != &params || cache.generation != params.generation) {
    Fail(ErrorKind::kInvalidArgument, "stale encoder cache: parameters changed since encode");
  }
  const Eigen::Index H = static_cast<Eigen::Index>(params.hidden());
  if (upstream.size() != 2 * H) Fail(ErrorKind::kInvalidArgument, "upstream gradient has wrong length");
  const auto T = static_cast<Eigen::Index>(cache.tokens.size());
  if (T == 0) return;

  // Layer 2: only the final step of each direction feeds the title vector.
  Eigen::MatrixXd dh_fwd = Eigen::MatrixXd::Zero(H, T);
  Eigen::MatrixXd dh_bwd = Eigen::MatrixXd::Zero(H, T);
  dh_fwd.col(T - 1) = upstream.head(H);
  dh_bwd.col(T - 1) = upstream.tail(H);

  for (std::size_t layer = kLayers; layer-- > 0;) {
    const std::size_t fi = CellIndex(layer, Direction::kForward);
    const std::size_t bi = CellIndex(layer, Direction::kBackward);
    Eigen::MatrixXd dx = BackpropDirection(params.cells[fi], cache.directions[fi], dh_fwd, grads.cells[fi]);
    dx += Reversed(BackpropDirection(params.cells[bi], cache.directions[bi], dh_bwd, grads.cells[bi]));
    if (layer > 0) {
      dh_fwd = dx.topRows(H);
      dh_bwd = Reversed(dx.bottomRows(H));
    } else {
      for (Eigen::Index t = 0; t < T; ++t) {
        auto [it, inserted] = grads.embedding_rows.try_emplace(cache.tokens[t]);
        if (inserted) {
          it->second = dx.col(t);
        } else {
          it->second += dx.col(t);
        }
      }
    }
  }
}

BiLstmGradients EncodeBackward(const BiLstmParams &params, const EncoderCache &cache,
                               const Eigen::VectorXd &upstream) {
  BiLstmGradients grads = BiLstmGradients::ZerosLike(params);
  AccumulateEncodeBackward(params, cache, upstream, grads);
  return grads;
}

void ApplySgd(BiLstmParams &params, const BiLstmGradients &grads, double learning_rate) {
  for (const auto &[id, row] : grads.embedding_rows) {
    params.embedding.row(id) -= learning_rate * row.transpose();
  }
  for (std::size_t k = 0; k < 4; ++k) {
    params.cells[k].W -= learning_rate * grads.cells[k].dW;
    params.cells[k].U -= learning_rate * grads.cells[k].dU;
    params.cells[k].b -= learning_rate * grads.cells[k].db;
  }
  ++params.generation;
}

std::string SerializeEncoder(const BiLstmParams &params) {
  BinaryWriter w;
  w.magic(kMagic);
  w.u64(params.vocab_size());
  w.u64(params.embed_dim());
  w.u64(params.hidden());
  w.u64(kLayers);
  WriteRowMajor(w, params.embedding);
  for (const auto &cell : params.cells) {
    WriteRowMajor(w, cell.W);
    WriteRowMajor(w, cell.U);
    w.f64s(std::span<const double>(cell.b.data(), static_cast<std::size_t>(cell.b.size())));
  }
  return w.bytes();
}

void SaveEncoder(const BiLstmParams &params, const std::string &path) { WriteFile(path, SerializeEncoder(params)); }

BiLstmParams LoadEncoder(const std::string &path) {
  BinaryReader r = BinaryReader::open(path);
  r.expect_magic(kMagic);
  const std::uint64_t V = r.u64(), E = r.u64(), H = r.u64(), layers = r.u64();
  if (layers != kLayers || V == 0 || E == 0 || H == 0) Fail(ErrorKind::kFormat, path + ": unsupported encoder shape");
  const long double doubles = static_cast<long double>(V) * E + 4.0L * H * (E + H + 1) * 2 +
                              4.0L * H * (2 * H + H + 1) * 2;
  if (8.0L * doubles != static_cast<long double>(r.remaining())) {
    Fail(ErrorKind::kFormat, path + ": header shape does not match table data (truncated or corrupt)");
  }
  BiLstmParams p;
  p.embedding.resize(static_cast<Eigen::Index>(V), static_cast<Eigen::Index>(E));
  ReadRowMajor(r, p.embedding);
  const auto h = static_cast<Eigen::Index>(H);
  for (std::size_t k = 0; k < 4; ++k) {
    const Eigen::Index in = k < 2 ? static_cast<Eigen::Index>(E) : 2 * h;
    p.cells[k].W.resize(4 * h, in);
    p.cells[k].U.resize(4 * h, h);
    p.cells[k].b.resize(4 * h);
    ReadRowMajor(r, p.cells[k].W);
    ReadRowMajor(r, p.cells[k].U);
    for (Eigen::Index i = 0; i < 4 * h; ++i) p.cells[k].b(i) = r.f64();
  }
  r.expect_end();
  return p;
}

}  // namespace kgnews
