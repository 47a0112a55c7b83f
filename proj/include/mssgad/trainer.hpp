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
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mssgad/anomaly_aware.hpp"
#include "mssgad/encoder.hpp"
#include "mssgad/optim.hpp"

namespace mssgad {

enum class OptimizerKind { kSgd, kAdam };

inline OptimizerKind parse_optimizer(std::string_view s) {
  if (s == "sgd") return OptimizerKind::kSgd;
  if (s == "adam") return OptimizerKind::kAdam;
  throw ConfigError("unknown optimizer '" + std::string(s) + "' (expected sgd or adam)");
}

inline const char* to_string(OptimizerKind k) { return k == OptimizerKind::kSgd ? "sgd" : "adam"; }

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  std::uint64_t seed = 0;
  // Force alpha = beta = 1 instead of the anomaly-aware decision.
  bool ablate_constant_weights = false;
  // Drop the anchor-vs-anchor term from both losses.
  bool ablate_drop_dist3 = false;
  // Redraw anchors and re-decide weights at the start of every epoch.
  bool refresh_anchors_per_epoch = false;
  PoolKind fe_kind = PoolKind::kMax;
  std::vector<std::size_t> hidden_dims = {128, 64, 32};
  std::size_t anchor_k = 4;
  bool normalize = true;

  EncoderOptions encoder() const { return EncoderOptions{fe_kind, normalize, 1e-12}; }

  void validate() const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
      throw ConfigError("learning_rate must be a positive real");
    }
    if (hidden_dims.size() < 2) throw ConfigError("encoder needs at least two hidden layers");
    if (anchor_k < 1) throw ConfigError("anchor_k must be >= 1");
  }
};

// Per-epoch means of the batch distances and losses.
struct TrainingRecord {
  std::size_t epoch = 0;
  double dist1 = 0, dist2 = 0, dist3 = 0, dist4 = 0, dist5 = 0;
  double loss_p = 0, loss_n = 0;
};

// Frozen anchor representations; one row per anchor graph.
struct AnchorEncodings {
  Matrix normal_graph, normal_node;
  Matrix abnormal_graph, abnormal_node;
};

struct TrainedModel {
  ModelParams params;
  EncoderOptions encoder;
  AnchorSets anchors;
  WeightFactors weights;
  DistanceProfile profile;
  AnchorEncodings anchor_reps;
  std::uint64_t source_fingerprint = 0;
  std::uint64_t seed = 0;
  std::vector<TrainingRecord> log;
};

// Training produced a non-finite loss or gradient. Carries a complete model
// built from the parameters before the failing update.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, TrainedModel last_good, std::size_t epoch)
      : Error(what), last_good_(std::move(last_good)), epoch_(epoch) {}
  const TrainedModel& last_good() const { return last_good_; }
  std::size_t epoch() const { return epoch_; }

 private:
  TrainedModel last_good_;
  std::size_t epoch_;
};

// Row-stacked representations of a batch of encodings.
struct EncodingStack {
  Var graph_reps;
  Var node_reps;
};

inline EncodingStack stack_encodings(const std::vector<Encoding>& batch) {
  if (batch.empty()) throw DimensionError("empty batch of encodings");
  std::vector<Var> g, n;
  g.reserve(batch.size());
  n.reserve(batch.size());
  for (const Encoding& e : batch) {
    g.push_back(e.graph_rep);
    n.push_back(e.pooled_node_rep);
  }
  return {ops::concat_rows(g), ops::concat_rows(n)};
}

// Mean over cross pairs of alpha * graph distance + beta * node distance.
inline Var space_distance(const EncodingStack& a, const EncodingStack& b, const WeightFactors& w) {
  Tape& tape = a.graph_reps.tape();
  Var total;
  auto add_term = [&](const Var& term) { total = total.valid() ? ops::add(total, term) : term; };
  if (w.alpha != 0.0) add_term(ops::scale(ops::pairwise_mean_distance(a.graph_reps, b.graph_reps), w.alpha));
  if (w.beta != 0.0) add_term(ops::scale(ops::pairwise_mean_distance(a.node_reps, b.node_reps), w.beta));
  if (!total.valid()) total = tape.constant(Matrix::Zero(1, 1));
  return total;
}

inline Var space_distance(const std::vector<Encoding>& a, const std::vector<Encoding>& b,
                          const WeightFactors& w) {
  return space_distance(stack_encodings(a), stack_encodings(b), w);
}

// Normal phase: Dist1 - Dist2 - Dist3.
inline double loss_p(double d1, double d2, double d3, const TrainConfig& cfg) {
  return cfg.ablate_drop_dist3 ? d1 - d2 : d1 - d2 - d3;
}

// Abnormal phase: Dist5 - Dist4 - Dist3.
inline double loss_n(double d5, double d4, double d3, const TrainConfig& cfg) {
  return cfg.ablate_drop_dist3 ? d5 - d4 : d5 - d4 - d3;
}

inline Var loss_p(const Var& d1, const Var& d2, const Var& d3, const TrainConfig& cfg) {
  const Var base = ops::sub(d1, d2);
  return cfg.ablate_drop_dist3 ? base : ops::sub(base, d3);
}

inline Var loss_n(const Var& d5, const Var& d4, const Var& d3, const TrainConfig& cfg) {
  const Var base = ops::sub(d5, d4);
  return cfg.ablate_drop_dist3 ? base : ops::sub(base, d3);
}

enum class Phase { kNormal, kAbnormal };

struct BatchResult {
  double dist_same = 0;   // Dist1 (normal phase) or Dist5 (abnormal phase)
  double dist_cross = 0;  // Dist2 or Dist4
  double dist3 = 0;
  double loss = 0;
  std::vector<Matrix> grads;
};

// Forward and backward for one batch. `batch` indexes into `set`.
inline BatchResult batch_loss_and_grads(const GraphSet& set, const std::vector<std::size_t>& batch,
                                        Phase phase, const AnchorSets& anchors,
                                        const WeightFactors& w, const ModelParams& params,
                                        const TrainConfig& cfg) {
  Tape tape;
  const std::vector<Var> weights = bind_weights(tape, params, true);
  const EncoderOptions opts = cfg.encoder();
  auto encode_all = [&](const std::vector<std::size_t>& idx) {
    std::vector<Encoding> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(encode(tape, set[i], weights, opts));
    return stack_encodings(out);
  };
  const EncodingStack b = encode_all(batch);
  const EncodingStack ps = encode_all(anchors.normal);
  const EncodingStack ns = encode_all(anchors.abnormal);
  const Var d3 = space_distance(ps, ns, w);
  Var same, cross, loss;
  if (phase == Phase::kNormal) {
    same = space_distance(b, ps, w);
    cross = space_distance(b, ns, w);
    loss = loss_p(same, cross, d3, cfg);
  } else {
    same = space_distance(b, ns, w);
    cross = space_distance(b, ps, w);
    loss = loss_n(same, cross, d3, cfg);
  }
  tape.backward(loss);
  BatchResult r{same.scalar(), cross.scalar(), d3.scalar(), loss.scalar(), {}};
  r.grads.reserve(weights.size());
  for (const Var& v : weights) r.grads.push_back(v.grad());
  return r;
}

inline AnchorEncodings encode_anchors(const GraphSet& set, const AnchorSets& anchors,
                                      const ModelParams& params, const EncoderOptions& opts) {
  auto rows = [&](const std::vector<std::size_t>& idx, Matrix& graph, Matrix& node) {
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const EncodedGraph e = encode_values(set[idx[r]], params, opts);
      if (r == 0) {
        graph.resize(static_cast<Eigen::Index>(idx.size()), e.graph_rep.size());
        node.resize(static_cast<Eigen::Index>(idx.size()), e.pooled_node_rep.size());
      }
      graph.row(static_cast<Eigen::Index>(r)) = e.graph_rep;
      node.row(static_cast<Eigen::Index>(r)) = e.pooled_node_rep;
    }
  };
  AnchorEncodings a;
  rows(anchors.normal, a.normal_graph, a.normal_node);
  rows(anchors.abnormal, a.abnormal_graph, a.abnormal_node);
  return a;
}

namespace detail {

class Optimizer {
 public:
  explicit Optimizer(const TrainConfig& cfg)
      : kind_(cfg.optimizer), lr_(cfg.learning_rate), adam_(cfg.learning_rate) {}

  void step(std::vector<Matrix>& params, std::vector<Matrix>& grads) {
    if (kind_ == OptimizerKind::kSgd) {
      sgd_step(params, grads, lr_);
    } else {
      adam_.step(params, grads);
    }
  }

 private:
  OptimizerKind kind_;
  double lr_;
  Adam adam_;
};

inline std::vector<std::vector<std::size_t>> make_batches(std::vector<std::size_t> members,
                                                          std::size_t batch_size, Rng& rng) {
  shuffle_in_place(members, rng);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < members.size(); start += batch_size) {
    const std::size_t end = std::min(members.size(), start + batch_size);
    out.emplace_back(members.begin() + static_cast<std::ptrdiff_t>(start),
                     members.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

}  // namespace detail

struct AnchorDecision {
  AnchorSets anchors;
  DistanceProfile profile;
  WeightFactors weights;
};

inline AnchorDecision decide_anchors(const GraphSet& set, const ModelParams& params,
                                     const TrainConfig& cfg, std::uint64_t anchor_seed) {
  AnchorDecision d;
  d.anchors = sample_anchors(set, cfg.anchor_k, anchor_seed);
  d.profile = representation_distances(set, d.anchors, params, cfg.encoder());
  d.weights = cfg.ablate_constant_weights ? WeightFactors{1.0, 1.0} : decide_weights(d.profile);
  return d;
}

// Full training run: random init, anchors and weights decided once on the
// initial parameters, then per epoch the normal partition in batches under
// loss_p followed by the abnormal partition under loss_n.
inline TrainedModel train(const GraphSet& set, const TrainConfig& cfg) {
  cfg.validate();
  const Partition part = split_by_label(set);

  std::vector<std::size_t> dims{set.feature_dim()};
  dims.insert(dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());

  TrainedModel model;
  model.seed = cfg.seed;
  model.encoder = cfg.encoder();
  model.source_fingerprint = set.fingerprint();
  model.params = init_params(dims, derive_seed(cfg.seed, "init"));

  AnchorDecision decision = decide_anchors(set, model.params, cfg, derive_seed(cfg.seed, "anchors"));

  detail::Optimizer optimizer(cfg);
  Rng batch_rng = make_rng(cfg.seed, "batches");

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.refresh_anchors_per_epoch && epoch > 1) {
      decision = decide_anchors(set, model.params, cfg, derive_seed(cfg.seed, "anchors", epoch));
    }
    TrainingRecord rec;
    rec.epoch = epoch;
    std::size_t n_p = 0, n_n = 0;
    double d3_sum = 0.0;

    auto run_phase = [&](const std::vector<std::size_t>& members, Phase phase) {
      for (const auto& batch : detail::make_batches(members, cfg.batch_size, batch_rng)) {
        BatchResult r;
        try {
          r = batch_loss_and_grads(set, batch, phase, decision.anchors, decision.weights,
                                   model.params, cfg);
          ModelParams next = model.params;
          optimizer.step(next.weights, r.grads);
          for (const Matrix& w : next.weights) {
            if (!w.allFinite()) throw NumericError("non-finite parameter after update");
          }
          model.params = std::move(next);
        } catch (const NumericError& e) {
          TrainedModel checkpoint = model;
          checkpoint.anchors = decision.anchors;
          checkpoint.profile = decision.profile;
          checkpoint.weights = decision.weights;
          checkpoint.anchor_reps =
              encode_anchors(set, checkpoint.anchors, checkpoint.params, checkpoint.encoder);
          throw DivergenceError("training diverged in epoch " + std::to_string(epoch) + ": " +
                                    e.what(),
                                std::move(checkpoint), epoch);
        }
        d3_sum += r.dist3;
        if (phase == Phase::kNormal) {
          rec.dist1 += r.dist_same;
          rec.dist2 += r.dist_cross;
          rec.loss_p += r.loss;
          ++n_p;
        } else {
          rec.dist5 += r.dist_same;
          rec.dist4 += r.dist_cross;
          rec.loss_n += r.loss;
          ++n_n;
        }
      }
    };
    run_phase(part.normal, Phase::kNormal);
    run_phase(part.abnormal, Phase::kAbnormal);

    rec.dist1 /= static_cast<double>(n_p);
    rec.dist2 /= static_cast<double>(n_p);
    rec.loss_p /= static_cast<double>(n_p);
    rec.dist4 /= static_cast<double>(n_n);
    rec.dist5 /= static_cast<double>(n_n);
    rec.loss_n /= static_cast<double>(n_n);
    rec.dist3 = d3_sum / static_cast<double>(n_p + n_n);
    model.log.push_back(rec);
  }

  model.anchors = decision.anchors;
  model.profile = decision.profile;
  model.weights = decision.weights;
  model.anchor_reps = encode_anchors(set, model.anchors, model.params, model.encoder);
  return model;
}

inline void write_training_log_csv(std::ostream& out, const std::vector<TrainingRecord>& log) {
  out << "epoch,dist1,dist2,dist3,dist4,dist5,loss_p,loss_n\n";
  out.precision(17);
  for (const TrainingRecord& r : log) {
    out << r.epoch << ',' << r.dist1 << ',' << r.dist2 << ',' << r.dist3 << ',' << r.dist4 << ','
        << r.dist5 << ',' << r.loss_p << ',' << r.loss_n << '\n';
  }
}

}  // namespace mssgad
