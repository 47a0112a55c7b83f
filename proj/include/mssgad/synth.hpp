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

// Toy corpora with the two anomaly archetypes: a structural one (a hexagon
// broken by inserted nodes) and a connectivity one (nodes cut off from the
// rest of the graph). Labels: 0 = normal, 1 = abnormal. Degree features.

#include <set>
#include <vector>

#include "mssgad/graph.hpp"
#include "mssgad/rng.hpp"

namespace mssgad::synth {

inline constexpr int kNormalLabel = 0;
inline constexpr int kAbnormalLabel = 1;

namespace detail {

// 6-cycle plus chords. Chords are added in random order until every cycle
// node has degree >= 3; each remaining chord is then kept with probability
// 1/4.
inline std::vector<Edge> chorded_hexagon(Rng& rng) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < 6; ++i) edges.emplace_back(i, (i + 1) % 6);
  std::vector<Edge> chords;
  for (std::size_t u = 0; u < 6; ++u) {
    for (std::size_t v = u + 2; v < 6; ++v) {
      if (!(u == 0 && v == 5)) chords.emplace_back(u, v);
    }
  }
  shuffle_in_place(chords, rng);
  std::vector<int> degree(6, 2);
  auto covered = [&] {
    for (int d : degree) {
      if (d < 3) return false;
    }
    return true;
  };
  for (const Edge& c : chords) {
    const bool helps = degree[c.first] < 3 || degree[c.second] < 3;
    if ((!covered() && helps) || (covered() && uniform_index(rng, 4) == 0)) {
      edges.push_back(c);
      ++degree[c.first];
      ++degree[c.second];
    }
  }
  return edges;
}

// Random recursive spanning tree on n nodes plus 1..n/2 extra edges.
inline std::vector<Edge> connected_random(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  shuffle_in_place(order, rng);
  std::set<Edge> edges;
  for (std::size_t i = 1; i < n; ++i) {
    std::size_t u = order[i], v = order[uniform_index(rng, i)];
    edges.insert(u < v ? Edge{u, v} : Edge{v, u});
  }
  const std::size_t extra = 1 + uniform_index(rng, n / 2);
  const std::size_t max_edges = n * (n - 1) / 2;
  for (std::size_t added = 0; added < extra && edges.size() < max_edges;) {
    std::size_t u = uniform_index(rng, n), v = uniform_index(rng, n);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (edges.insert({u, v}).second) ++added;
  }
  return {edges.begin(), edges.end()};
}

}  // namespace detail

inline GraphSet hexagon_corpus(std::size_t n_normal, std::size_t n_abnormal, std::uint64_t seed) {
  if (n_normal + n_abnormal == 0) throw DimensionError("hexagon corpus needs at least one graph");
  Rng rng = make_rng(seed, "synth-hexagon");
  std::vector<Graph> graphs;
  graphs.reserve(n_normal + n_abnormal);
  for (std::size_t i = 0; i < n_normal; ++i) {
    graphs.push_back(Graph::with_degree_features(6, detail::chorded_hexagon(rng), kNormalLabel));
  }
  for (std::size_t i = 0; i < n_abnormal; ++i) {
    std::vector<Edge> edges = detail::chorded_hexagon(rng);
    // Reroute one cycle edge through 1..3 new nodes.
    const std::size_t a = uniform_index(rng, 6), b = (a + 1) % 6;
    const std::size_t extra = 1 + uniform_index(rng, 3);
    std::erase_if(edges, [&](const Edge& e) {
      return (e.first == a && e.second == b) || (e.first == b && e.second == a);
    });
    std::size_t prev = a;
    for (std::size_t k = 0; k < extra; ++k) {
      edges.emplace_back(prev, 6 + k);
      prev = 6 + k;
    }
    edges.emplace_back(prev, b);
    graphs.push_back(Graph::with_degree_features(6 + extra, std::move(edges), kAbnormalLabel));
  }
  return GraphSet(std::move(graphs), kAbnormalLabel, "HEXAGON");
}

inline GraphSet connectivity_corpus(std::size_t n_normal, std::size_t n_abnormal,
                                    std::uint64_t seed) {
  if (n_normal + n_abnormal == 0) {
    throw DimensionError("connectivity corpus needs at least one graph");
  }
  Rng rng = make_rng(seed, "synth-connectivity");
  std::vector<Graph> graphs;
  graphs.reserve(n_normal + n_abnormal);
  for (std::size_t i = 0; i < n_normal; ++i) {
    const std::size_t n = 6 + uniform_index(rng, 7);
    graphs.push_back(
        Graph::with_degree_features(n, detail::connected_random(n, rng), kNormalLabel));
  }
  for (std::size_t i = 0; i < n_abnormal; ++i) {
    const std::size_t n = 6 + uniform_index(rng, 7);
    while (true) {
      std::vector<Edge> edges = detail::connected_random(n, rng);
      std::vector<std::size_t> degree(n, 0);
      for (const auto& [u, v] : edges) {
        ++degree[u];
        ++degree[v];
      }
      std::vector<std::size_t> candidates;
      for (std::size_t v = 0; v < n; ++v) {
        if (degree[v] >= 1 && degree[v] <= 4) candidates.push_back(v);
      }
      if (candidates.empty()) continue;
      // Cut every edge of one node (1..4 removals), isolating it.
      const std::size_t victim = candidates[uniform_index(rng, candidates.size())];
      std::erase_if(edges, [&](const Edge& e) { return e.first == victim || e.second == victim; });
      graphs.push_back(Graph::with_degree_features(n, std::move(edges), kAbnormalLabel));
      break;
    }
  }
  return GraphSet(std::move(graphs), kAbnormalLabel, "CONNECTIVITY");
}

// Number of connected components (union-find).
inline std::size_t connected_components(const Graph& g) {
  std::vector<std::size_t> parent(g.num_nodes());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = g.num_nodes();
  for (const auto& [u, v] : g.edges()) {
    const std::size_t ru = find(u), rv = find(v);
    if (ru != rv) {
      parent[ru] = rv;
      --components;
    }
  }
  return components;
}

}  // namespace mssgad::synth
