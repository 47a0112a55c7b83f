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
#include <cstdint>
#include <cstring>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mssgad/error.hpp"
#include "mssgad/rng.hpp"
#include "mssgad/tape.hpp"

namespace mssgad {

using Edge = std::pair<std::size_t, std::size_t>;

// Degree of every node as an n x 1 matrix of raw counts.
inline Matrix degree_features(std::size_t num_nodes, const std::vector<Edge>& edges) {
  Matrix deg = Matrix::Zero(static_cast<Eigen::Index>(num_nodes), 1);
  for (const auto& [u, v] : edges) {
    deg(static_cast<Eigen::Index>(u), 0) += 1.0;
    deg(static_cast<Eigen::Index>(v), 0) += 1.0;
  }
  return deg;
}

// Undirected attributed graph. Edges are stored once, as (u, v) with u < v,
// sorted and deduplicated; self-loops are rejected.
class Graph {
 public:
  Graph(std::size_t num_nodes, std::vector<Edge> edges, Matrix features, int label)
      : num_nodes_(num_nodes), features_(std::move(features)), label_(label) {
    if (num_nodes_ == 0) throw DimensionError("graph must have at least one node");
    for (auto& [u, v] : edges) {
      if (u >= num_nodes_ || v >= num_nodes_) {
        throw DimensionError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                             ") outside [0, " + std::to_string(num_nodes_) + ")");
      }
      if (u == v) throw DimensionError("self-loop on node " + std::to_string(u));
      if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);
    if (features_.size() == 0) features_ = mssgad::degree_features(num_nodes_, edges_);
    if (static_cast<std::size_t>(features_.rows()) != num_nodes_) {
      throw DimensionError("feature matrix has " + std::to_string(features_.rows()) +
                           " rows for " + std::to_string(num_nodes_) + " nodes");
    }
    if (!features_.allFinite()) throw NumericError("non-finite node features");
  }

  // Graph whose features are node degrees.
  static Graph with_degree_features(std::size_t num_nodes, std::vector<Edge> edges, int label) {
    return Graph(num_nodes, std::move(edges), Matrix{}, label);
  }

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Matrix& features() const { return features_; }
  std::size_t feature_dim() const { return static_cast<std::size_t>(features_.cols()); }
  int label() const { return label_; }

  Matrix degree_features() const { return mssgad::degree_features(num_nodes_, edges_); }

  // Symmetric 0/1 adjacency with a zero diagonal.
  Matrix adjacency() const {
    const auto n = static_cast<Eigen::Index>(num_nodes_);
    Matrix a = Matrix::Zero(n, n);
    for (const auto& [u, v] : edges_) {
      a(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = 1.0;
      a(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) = 1.0;
    }
    return a;
  }

  // Same graph with nodes relabelled: node i becomes perm[i].
  Graph permuted(const std::vector<std::size_t>& perm) const {
    if (perm.size() != num_nodes_) throw DimensionError("permutation size mismatch");
    std::vector<Edge> e;
    e.reserve(edges_.size());
    for (const auto& [u, v] : edges_) e.emplace_back(perm[u], perm[v]);
    Matrix f(features_.rows(), features_.cols());
    for (std::size_t i = 0; i < num_nodes_; ++i) {
      f.row(static_cast<Eigen::Index>(perm[i])) = features_.row(static_cast<Eigen::Index>(i));
    }
    return Graph(num_nodes_, std::move(e), std::move(f), label_);
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.num_nodes_ == b.num_nodes_ && a.label_ == b.label_ && a.edges_ == b.edges_ &&
           a.features_.rows() == b.features_.rows() &&
           a.features_.cols() == b.features_.cols() && a.features_ == b.features_;
  }

 private:
  std::size_t num_nodes_;
  std::vector<Edge> edges_;
  Matrix features_;
  int label_;
};

using GraphPtr = std::shared_ptr<const Graph>;

// Ordered, immutable collection of graphs plus the label that marks a graph
// as abnormal. Graphs are shared, so subsets and re-orientations are cheap.
class GraphSet {
 public:
  GraphSet() = default;

  GraphSet(std::vector<Graph> graphs, int anomaly_label, std::string name)
      : anomaly_label_(anomaly_label), name_(std::move(name)) {
    graphs_.reserve(graphs.size());
    for (Graph& g : graphs) graphs_.push_back(std::make_shared<const Graph>(std::move(g)));
    validate();
  }

  GraphSet(std::vector<GraphPtr> graphs, int anomaly_label, std::string name)
      : graphs_(std::move(graphs)), anomaly_label_(anomaly_label), name_(std::move(name)) {
    validate();
  }

  std::size_t size() const { return graphs_.size(); }
  bool empty() const { return graphs_.empty(); }
  const Graph& operator[](std::size_t i) const { return *graphs_.at(i); }
  const GraphPtr& ptr(std::size_t i) const { return graphs_.at(i); }
  const std::vector<GraphPtr>& graphs() const { return graphs_; }
  int anomaly_label() const { return anomaly_label_; }
  const std::string& name() const { return name_; }

  bool is_abnormal(std::size_t i) const { return graphs_.at(i)->label() == anomaly_label_; }

  // 0 for an empty set.
  std::size_t feature_dim() const { return graphs_.empty() ? 0 : graphs_.front()->feature_dim(); }

  std::vector<int> labels() const {
    std::vector<int> out;
    out.reserve(graphs_.size());
    for (const GraphPtr& g : graphs_) out.push_back(g->label());
    return out;
  }

  // Sorted distinct graph labels.
  std::vector<int> classes() const {
    std::vector<int> c = labels();
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
  }

  GraphSet with_anomaly_label(int a) const { return GraphSet(graphs_, a, name_); }

  GraphSet subset(const std::vector<std::size_t>& indices) const {
    std::vector<GraphPtr> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(graphs_.at(i));
    return GraphSet(std::move(out), anomaly_label_, name_);
  }

  // Content hash over structure, features (bit patterns), and labels.
  std::uint64_t fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* p, std::size_t n) {
      h = fnv1a64(std::string_view(static_cast<const char*>(p), n), h);
    };
    const std::uint64_t count = graphs_.size();
    mix(&count, sizeof count);
    for (const GraphPtr& g : graphs_) {
      const std::uint64_t n = g->num_nodes(), m = g->num_edges();
      const std::int64_t label = g->label();
      mix(&n, sizeof n);
      mix(&m, sizeof m);
      mix(&label, sizeof label);
      for (const auto& [u, v] : g->edges()) {
        const std::uint64_t uv[2] = {u, v};
        mix(uv, sizeof uv);
      }
      mix(g->features().data(), static_cast<std::size_t>(g->features().size()) * sizeof(double));
    }
    return h;
  }

  friend bool operator==(const GraphSet& a, const GraphSet& b) {
    if (a.size() != b.size() || a.anomaly_label_ != b.anomaly_label_ || a.name_ != b.name_) {
      return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!(a[i] == b[i])) return false;
    }
    return true;
  }

 private:
  void validate() const {
    for (const GraphPtr& g : graphs_) {
      if (g->feature_dim() != graphs_.front()->feature_dim()) {
        throw DimensionError("graph set '" + name_ + "' mixes feature dimensions " +
                             std::to_string(graphs_.front()->feature_dim()) + " and " +
                             std::to_string(g->feature_dim()));
      }
    }
  }

  std::vector<GraphPtr> graphs_;
  int anomaly_label_ = 1;
  std::string name_;
};

struct Partition {
  std::vector<std::size_t> normal;
  std::vector<std::size_t> abnormal;
};

// Abnormal = label equals the set's anomaly label; order preserved.
inline Partition split_by_label(const GraphSet& set) {
  if (set.empty()) throw PartitionError("cannot partition an empty graph set");
  Partition p;
  for (std::size_t i = 0; i < set.size(); ++i) {
    (set.is_abnormal(i) ? p.abnormal : p.normal).push_back(i);
  }
  if (p.normal.empty() || p.abnormal.empty()) {
    throw PartitionError("graph set '" + set.name() + "' with anomaly label " +
                         std::to_string(set.anomaly_label()) + " has " +
                         std::to_string(p.normal.size()) + " normal and " +
                         std::to_string(p.abnormal.size()) + " abnormal graphs");
  }
  return p;
}

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;
  std::uint64_t seed = 0;

  std::vector<std::size_t> test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
      if (assignments[i] == fold) out.push_back(i);
    }
    return out;
  }

  std::vector<std::size_t> train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
      if (assignments[i] != fold) out.push_back(i);
    }
    return out;
  }

  std::uint64_t hash() const {
    std::uint64_t h = fnv1a64(std::string_view(reinterpret_cast<const char*>(&k), sizeof k));
    for (std::size_t a : assignments) {
      const std::uint64_t v = a;
      h = fnv1a64(std::string_view(reinterpret_cast<const char*>(&v), sizeof v), h);
    }
    return h;
  }
};

// Stratified over the normal/abnormal partition. Each class is shuffled, the
// classes are laid end to end, and position i goes to fold i mod k; this
// keeps per-class and overall fold sizes within one of each other.
inline FoldPlan make_folds(const GraphSet& set, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw StratificationError("fold count must be at least 2");
  const Partition p = split_by_label(set);
  if (p.normal.size() < k || p.abnormal.size() < k) {
    throw StratificationError("cannot stratify " + std::to_string(p.normal.size()) +
                              " normal / " + std::to_string(p.abnormal.size()) +
                              " abnormal graphs into " + std::to_string(k) + " folds");
  }
  Rng rng(seed);
  std::vector<std::size_t> normal = p.normal, abnormal = p.abnormal;
  shuffle_in_place(normal, rng);
  shuffle_in_place(abnormal, rng);
  FoldPlan plan{k, std::vector<std::size_t>(set.size(), 0), seed};
  std::size_t pos = 0;
  for (std::size_t i : normal) plan.assignments[i] = pos++ % k;
  for (std::size_t i : abnormal) plan.assignments[i] = pos++ % k;
  return plan;
}

}  // namespace mssgad
