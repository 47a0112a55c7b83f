#include <gtest/gtest.h>

#include <algorithm>
#include <queue>
#include <set>

#include "mssgad/synth.hpp"
#include "mssgad/tudataset.hpp"
#include "test_util.hpp"

using namespace mssgad;

namespace {

// Components by breadth-first search over an adjacency list.
std::size_t bfs_components(const Graph& g) {
  std::vector<std::vector<std::size_t>> adj(g.num_nodes());
  for (const auto& [u, v] : g.edges()) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<bool> seen(g.num_nodes(), false);
  std::size_t count = 0;
  for (std::size_t s = 0; s < g.num_nodes(); ++s) {
    if (seen[s]) continue;
    ++count;
    std::queue<std::size_t> q;
    q.push(s);
    seen[s] = true;
    while (!q.empty()) {
      const std::size_t x = q.front();
      q.pop();
      for (std::size_t y : adj[x]) {
        if (!seen[y]) {
          seen[y] = true;
          q.push(y);
        }
      }
    }
  }
  return count;
}

bool has_edge(const Graph& g, std::size_t u, std::size_t v) {
  if (u > v) std::swap(u, v);
  return std::find(g.edges().begin(), g.edges().end(), Edge{u, v}) != g.edges().end();
}

}  // namespace

TEST(HexagonCorpus, SingleNormalContainsSixCycle) {
  const GraphSet s = synth::hexagon_corpus(1, 0, 3);
  ASSERT_EQ(s.size(), 1u);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_TRUE(has_edge(s[0], i, (i + 1) % 6));
}

TEST(HexagonCorpus, Shapes) {
  const GraphSet s = synth::hexagon_corpus(50, 50, 11);
  ASSERT_EQ(s.size(), 100u);
  EXPECT_EQ(s.name(), "HEXAGON");
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Graph& g = s[i];
    EXPECT_EQ(g.feature_dim(), 1u);
    EXPECT_EQ(g.features(), g.degree_features());
    if (g.label() == 0) {
      EXPECT_EQ(g.num_nodes(), 6u);
      for (std::size_t v = 0; v < 6; ++v) EXPECT_GE(g.features()(static_cast<Eigen::Index>(v), 0), 3.0);
    } else {
      EXPECT_GE(g.num_nodes(), 7u);
      EXPECT_LE(g.num_nodes(), 9u);
      // Exactly one hexagon edge is missing; its endpoints are joined by a
      // path through the extra nodes.
      int missing = 0;
      for (std::size_t v = 0; v < 6; ++v) missing += has_edge(g, v, (v + 1) % 6) ? 0 : 1;
      EXPECT_EQ(missing, 1);
      EXPECT_EQ(bfs_components(g), 1u);
      for (std::size_t v = 6; v < g.num_nodes(); ++v) {
        EXPECT_EQ(g.features()(static_cast<Eigen::Index>(v), 0), 2.0);
      }
    }
  }
}

TEST(HexagonCorpus, Deterministic) {
  EXPECT_EQ(synth::hexagon_corpus(20, 20, 5), synth::hexagon_corpus(20, 20, 5));
  EXPECT_NE(synth::hexagon_corpus(20, 20, 5).fingerprint(),
            synth::hexagon_corpus(20, 20, 6).fingerprint());
}

TEST(ConnectivityCorpus, ComponentCounts) {
  const GraphSet s = synth::connectivity_corpus(200, 200, 8);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Graph& g = s[i];
    EXPECT_GE(g.num_nodes(), 6u);
    EXPECT_LE(g.num_nodes(), 12u);
    const std::size_t c = bfs_components(g);
    EXPECT_EQ(c, synth::connected_components(g));
    if (g.label() == 0) {
      EXPECT_EQ(c, 1u);
    } else {
      EXPECT_GE(c, 2u);
    }
  }
}

TEST(ConnectivityCorpus, Deterministic) {
  EXPECT_EQ(synth::connectivity_corpus(10, 10, 7), synth::connectivity_corpus(10, 10, 7));
}

TEST(Synth, EmptyCorpusRejected) {
  EXPECT_THROW(synth::hexagon_corpus(0, 0, 1), DimensionError);
  EXPECT_THROW(synth::connectivity_corpus(0, 0, 1), DimensionError);
}

TEST(Synth, RoundTripThroughLoader) {
  testutil::TempDir d("synth");
  const GraphSet s = synth::hexagon_corpus(100, 100, 1);
  save_tudataset(s, d.path(), s.name(), false);
  const GraphSet back = load_tudataset(d.path(), s.name());
  EXPECT_EQ(back.size(), 200u);
  EXPECT_EQ(back, s);
}
