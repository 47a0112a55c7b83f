/*
 * Copyright 2026 The MssGAD Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mssgad/graph.hpp"
#include "mssgad/ops.hpp"
#include "mssgad/rng.hpp"

namespace mssgad {

// D^-1/2 (A + I) D^-1/2 with D the degree matrix of A + I.
inline Matrix normalize_adjacency(const Graph& g) {
  Matrix a = g.adjacency();
  a.diagonal().array() += 1.0;
  const Eigen::VectorXd inv_sqrt = a.rowwise().sum().array().rsqrt();
  return inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
}

// Node readout f_e used for the node-level channel.
enum class PoolKind { kMax, kMean };

inline PoolKind parse_pool_kind(std::string_view s) {
  if (s == "max") return PoolKind::kMax;
  if (s == "mean") return PoolKind::kMean;
  throw ConfigError("unknown pooling '" + std::string(s) + "' (expected max or mean)");
}

inline const char* to_string(PoolKind k) { return k == PoolKind::kMax ? "max" : "mean"; }

inline Var pool_nodes_fe(const Var& node_reps, PoolKind kind) {
  return kind == PoolKind::kMax ? ops::row_max_pool(node_reps) : ops::row_mean_pool(node_reps);
}

// GCN weights. dims = [d_in, d_1, ..., d_L], weights[l] is dims[l] x dims[l+1].
struct ModelParams {
  std::vector<std::size_t> dims;
  std::vector<Matrix> weights;

  std::size_t layers() const { return weights.size(); }

  friend bool operator==(const ModelParams& a, const ModelParams& b) {
    if (a.dims != b.dims || a.weights.size() != b.weights.size()) return false;
    for (std::size_t i = 0; i < a.weights.size(); ++i) {
      if (a.weights[i] != b.weights[i]) return false;
    }
    return true;
  }
};

// Glorot-uniform: U(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
inline ModelParams init_params(const std::vector<std::size_t>& dims, std::uint64_t seed) {
  if (dims.size() < 3) {
    throw DimensionError("encoder needs at least two layers (dims of length >= 3), got " +
                         std::to_string(dims.size()));
  }
  for (std::size_t d : dims) {
    if (d == 0) throw DimensionError("encoder dimensions must be positive");
  }
  Rng rng(seed);
  ModelParams p{dims, {}};
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const double a = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
    Matrix w(static_cast<Eigen::Index>(dims[l]), static_cast<Eigen::Index>(dims[l + 1]));
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = (2.0 * uniform_unit(rng) - 1.0) * a;
    p.weights.push_back(std::move(w));
  }
  return p;
}

struct EncoderOptions {
  PoolKind fe = PoolKind::kMax;
  // L2-normalize graph_rep and pooled_node_rep.
  bool normalize = true;
  double eps = 1e-12;
};

// node_reps come from the penultimate layer, graph_rep from the last.
struct Encoding {
  Var node_reps;        // n x d_{L-1}
  Var graph_rep;        // 1 x d_L
  Var pooled_node_rep;  // 1 x d_{L-1}
};

// H^l = ReLU(Â H^{l-1} W^l) for l < L, H^L = Â H^{L-1} W^L.
inline Encoding encode(Tape& tape, const Graph& g, const std::vector<Var>& weights,
                       const EncoderOptions& opts = {}) {
  if (weights.size() < 2) throw DimensionError("encoder needs at least two layers");
  if (static_cast<Eigen::Index>(g.feature_dim()) != weights.front().rows()) {
    throw DimensionError("graph has " + std::to_string(g.feature_dim()) +
                         " feature columns, encoder expects " +
                         std::to_string(weights.front().rows()));
  }
  const Var adj = tape.constant(normalize_adjacency(g));
  Var h = tape.constant(g.features());
  Var penultimate;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const Var& w = weights[l];
    // Propagate on the narrower side first.
    Var z = w.rows() <= w.cols() ? ops::matmul(ops::matmul(adj, h), w)
                                 : ops::matmul(adj, ops::matmul(h, w));
    const bool last = l + 1 == weights.size();
    h = last ? z : ops::relu(z);
    if (l + 2 == weights.size()) penultimate = h;
  }
  Var graph_rep = ops::row_max_pool(h);
  Var pooled = pool_nodes_fe(penultimate, opts.fe);
  if (opts.normalize) {
    graph_rep = ops::l2_normalize_rows(graph_rep, opts.eps);
    pooled = ops::l2_normalize_rows(pooled, opts.eps);
  }
  return Encoding{penultimate, graph_rep, pooled};
}

inline std::vector<Var> bind_weights(Tape& tape, const ModelParams& params, bool trainable) {
  std::vector<Var> out;
  out.reserve(params.weights.size());
  for (const Matrix& w : params.weights) {
    out.push_back(trainable ? tape.variable(w) : tape.constant(w));
  }
  return out;
}

// Plain values of an encoding, for scoring and diagnostics.
struct EncodedGraph {
  Eigen::RowVectorXd graph_rep;
  Eigen::RowVectorXd pooled_node_rep;
};

inline EncodedGraph encode_values(const Graph& g, const ModelParams& params,
                                  const EncoderOptions& opts = {}) {
  Tape tape;
  const Encoding e = encode(tape, g, bind_weights(tape, params, false), opts);
  return EncodedGraph{e.graph_rep.value().row(0), e.pooled_node_rep.value().row(0)};
}

}  // namespace mssgad
