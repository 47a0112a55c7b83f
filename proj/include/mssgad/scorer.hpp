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

#include <string>
#include <vector>

#include "mssgad/trainer.hpp"

namespace mssgad {

struct ScoreResult {
  double dist_p = 0.0;
  double dist_n = 0.0;
  double score_g = 0.0;  // dist_n - dist_p; higher means more normal
  bool predicted_abnormal = false;
};

// Abnormal iff strictly below the threshold; a score equal to it is normal.
inline bool classify(double score, double threshold = 0.0) { return score < threshold; }

namespace detail {

inline double anchor_space_distance(const EncodedGraph& e, const Matrix& anchor_graph,
                                    const Matrix& anchor_node, const WeightFactors& w) {
  const Eigen::Index n = anchor_graph.rows();
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    total += w.alpha * (e.graph_rep - anchor_graph.row(j)).norm() +
             w.beta * (e.pooled_node_rep - anchor_node.row(j)).norm();
  }
  return total / static_cast<double>(n);
}

}  // namespace detail

inline ScoreResult score_encoding(const EncodedGraph& e, const TrainedModel& model,
                                  double threshold = 0.0) {
  ScoreResult r;
  r.dist_p = detail::anchor_space_distance(e, model.anchor_reps.normal_graph,
                                           model.anchor_reps.normal_node, model.weights);
  r.dist_n = detail::anchor_space_distance(e, model.anchor_reps.abnormal_graph,
                                           model.anchor_reps.abnormal_node, model.weights);
  r.score_g = r.dist_n - r.dist_p;
  r.predicted_abnormal = classify(r.score_g, threshold);
  return r;
}

// Distances to the frozen anchor representations of a trained model.
inline ScoreResult score_graph(const Graph& g, const TrainedModel& model, double threshold = 0.0) {
  if (g.feature_dim() != model.params.dims.front()) {
    throw DimensionError("graph has " + std::to_string(g.feature_dim()) +
                         " feature columns, model expects " +
                         std::to_string(model.params.dims.front()));
  }
  return score_encoding(encode_values(g, model.params, model.encoder), model, threshold);
}

}  // namespace mssgad
