#include <gtest/gtest.h>

#include <cmath>

#include "mssgad/metrics.hpp"
#include "mssgad/rng.hpp"
#include "oracles.hpp"

using namespace mssgad;

TEST(Auc, Examples) {
  EXPECT_EQ(auc({0.9, 0.8, 0.3}, {true, false, false}), 1.0);
  EXPECT_EQ(auc({0.3, 0.8, 0.9}, {true, false, false}), 0.0);
  EXPECT_EQ(auc({1, 1, 1, 1}, {true, false, true, false}), 0.5);
  EXPECT_EQ(auc({5, 6, 1, 2}, {true, true, false, false}), 1.0);
  EXPECT_EQ(auc({0.5, 0.5, 0.1}, {true, false, false}), 0.75);
}

TEST(Auc, SingleClassUndefined) {
  EXPECT_THROW(auc({1, 2}, {true, true}), UndefinedAucError);
  EXPECT_THROW(auc({1, 2}, {false, false}), UndefinedAucError);
  EXPECT_THROW(auc({1}, {true, false}), DimensionError);
}

TEST(Auc, MatchesPairCountingOracle) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 40);
    std::vector<double> s(n);
    std::vector<bool> pos(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(uniform_index(rng, 6));  // plenty of ties
      pos[i] = uniform_index(rng, 2) == 0;
    }
    pos[0] = true;
    pos[1] = false;
    EXPECT_NEAR(auc(s, pos), oracle::auc(s, pos), 1e-12);
  }
}

TEST(Auc, InvariantUnderMonotoneTransforms) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 30);
    std::vector<double> s(n), affine(n), cubic(n);
    std::vector<bool> pos(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = std::round((uniform_unit(rng) - 0.5) * 20.0) / 4.0;
      affine[i] = 3.5 * s[i] - 7.0;
      cubic[i] = s[i] * s[i] * s[i] + s[i];
      pos[i] = uniform_index(rng, 2) == 0;
    }
    pos[0] = true;
    pos[n - 1] = false;
    const double a = auc(s, pos);
    EXPECT_DOUBLE_EQ(auc(affine, pos), a);
    EXPECT_DOUBLE_EQ(auc(cubic, pos), a);
  }
}

TEST(Auc, FlippingOrientationComplements) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 30);
    std::vector<double> s(n), neg(n);
    std::vector<bool> pos(n), flipped(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(uniform_index(rng, 10));
      neg[i] = -s[i];
      pos[i] = uniform_index(rng, 2) == 0;
    }
    pos[0] = true;
    pos[1] = false;
    for (std::size_t i = 0; i < n; ++i) flipped[i] = !pos[i];
    EXPECT_NEAR(auc(neg, flipped), auc(s, pos), 1e-12);
    EXPECT_NEAR(auc(s, flipped), 1.0 - auc(s, pos), 1e-12);
  }
}

TEST(Stats, PopulationStd) {
  EXPECT_DOUBLE_EQ(mean({1, 2, 3, 4}), 2.5);
  EXPECT_DOUBLE_EQ(stddev({2, 4, 4, 4, 5, 5, 7, 9}), 2.0);
  EXPECT_EQ(stddev({3.0}), 0.0);
}
