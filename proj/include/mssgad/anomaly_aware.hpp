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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "mssgad/encoder.hpp"
#include "mssgad/graph.hpp"
#include "mssgad/rng.hpp"

namespace mssgad {

// k^round(log10(n)), clamped to [1, n]. The logarithm is rounded half-up.
inline std::size_t anchor_count(std::size_t set_size, std::size_t k) {
  if (set_size == 0) throw PartitionError("anchor_count: empty partition");
  if (k == 0) throw ConfigError("anchor ratio factor k must be >= 1");
  const auto exponent =
      static_cast<long>(std::floor(std::log10(static_cast<double>(set_size)) + 0.5));
  std::size_t count = 1;
  for (long e = 0; e < exponent && count < set_size; ++e) {
    if (count > std::numeric_limits<std::size_t>::max() / k) {
      count = set_size;
      break;
    }
    count *= k;
  }
  return std::clamp<std::size_t>(count, 1, set_size);
}

// Anchor indices refer to positions in the graph set they were drawn from.
struct AnchorSets {
  std::vector<std::size_t> normal;    // G_PS
  std::vector<std::size_t> abnormal;  // G_NS
  std::uint64_t seed = 0;
  std::size_t ratio_factor_k = 4;
};

// Uniform sampling without replacement, sized per partition by anchor_count.
inline AnchorSets sample_anchors(const GraphSet& set, std::size_t k, std::uint64_t seed) {
  const Partition p = split_by_label(set);
  Rng rng(seed);
  auto draw = [&](const std::vector<std::size_t>& members) {
    std::vector<std::size_t> picked;
    for (std::size_t pos : sample_without_replacement(members.size(),
                                                      anchor_count(members.size(), k), rng)) {
      picked.push_back(members[pos]);
    }
    std::sort(picked.begin(), picked.end());
    return picked;
  };
  AnchorSets a;
  a.normal = draw(p.normal);
  a.abnormal = draw(p.abnormal);
  a.seed = seed;
  a.ratio_factor_k = k;
  return a;
}

struct DistanceProfile {
  double d_pnode = 0.0;
  double d_pgraph = 0.0;
  double d_nnode = 0.0;
  double d_ngraph = 0.0;
};

struct WeightFactors {
  double alpha = 0.5;  // graph-level channel
  double beta = 0.5;   // node-level channel

  friend bool operator==(const WeightFactors&, const WeightFactors&) = default;
};

namespace detail {

inline double mean_pair_distance(const std::vector<Eigen::RowVectorXd>& a,
                                 const std::vector<Eigen::RowVectorXd>& b) {
  double total = 0.0;
  for (const auto& x : a) {
    for (const auto& y : b) total += (x - y).norm();
  }
  return total / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

}  // namespace detail

// Mean pairwise distances between the normal graphs and each anchor set, on
// both channels, under the given parameters.
inline DistanceProfile representation_distances(const GraphSet& set, const AnchorSets& anchors,
                                                const ModelParams& params,
                                                const EncoderOptions& opts = {}) {
  const Partition p = split_by_label(set);
  if (anchors.normal.empty() || anchors.abnormal.empty()) {
    throw PartitionError("representation_distances: empty anchor set");
  }
  std::vector<EncodedGraph> cache(set.size());
  std::vector<bool> done(set.size(), false);
  auto enc = [&](std::size_t i) -> const EncodedGraph& {
    if (!done[i]) {
      cache[i] = encode_values(set[i], params, opts);
      done[i] = true;
    }
    return cache[i];
  };
  auto collect = [&](const std::vector<std::size_t>& idx, bool graph_channel) {
    std::vector<Eigen::RowVectorXd> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(graph_channel ? enc(i).graph_rep : enc(i).pooled_node_rep);
    return out;
  };
  const auto normal_node = collect(p.normal, false);
  const auto normal_graph = collect(p.normal, true);
  DistanceProfile d;
  d.d_pnode = detail::mean_pair_distance(normal_node, collect(anchors.normal, false));
  d.d_pgraph = detail::mean_pair_distance(normal_graph, collect(anchors.normal, true));
  d.d_nnode = detail::mean_pair_distance(normal_node, collect(anchors.abnormal, false));
  d.d_ngraph = detail::mean_pair_distance(normal_graph, collect(anchors.abnormal, true));
  return d;
}

// Node-channel difference more than twice the graph-channel difference
// selects the node channel alone, and vice versa; otherwise both at 0.5.
inline WeightFactors decide_weights(const DistanceProfile& p) {
  const double node_diff = std::abs(p.d_pnode - p.d_nnode);
  const double graph_diff = std::abs(p.d_pgraph - p.d_ngraph);
  if (node_diff > 2.0 * graph_diff) return {0.0, 1.0};
  if (graph_diff > 2.0 * node_diff) return {1.0, 0.0};
  return {0.5, 0.5};
}

}  // namespace mssgad
