#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "mssgad/optim.hpp"

using namespace mssgad;

TEST(Sgd, SingleStep) {
  std::vector<Matrix> p{Matrix::Constant(1, 1, 1.0)};
  std::vector<Matrix> g{Matrix::Constant(1, 1, 0.5)};
  sgd_step(p, g, 0.1);
  EXPECT_DOUBLE_EQ(p[0](0, 0), 0.95);
  EXPECT_EQ(g[0](0, 0), 0.0);
}

TEST(Sgd, ZeroGradientLeavesParams) {
  std::vector<Matrix> p{Matrix::Constant(2, 3, 1.25)};
  std::vector<Matrix> g{Matrix::Zero(2, 3)};
  sgd_step(p, g, 0.1);
  EXPECT_EQ(p[0], Matrix::Constant(2, 3, 1.25));
  Adam adam(1e-3);
  adam.step(p, g);
  EXPECT_EQ(p[0], Matrix::Constant(2, 3, 1.25));
}

// Scalar Adam recurrence written out by hand.
TEST(Adam, MatchesScalarRecurrence) {
  const double lr = 1e-3, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  const double grads[] = {0.3, -2.0, 1e-4, 5.0, 0.0, -0.7};
  double w = 0.5, mo = 0.0, ve = 0.0;
  std::vector<Matrix> p{Matrix::Constant(1, 1, w)};
  Adam adam(lr, b1, b2, eps);
  int t = 0;
  for (double gv : grads) {
    ++t;
    mo = b1 * mo + (1 - b1) * gv;
    ve = b2 * ve + (1 - b2) * gv * gv;
    w -= lr * (mo / (1 - std::pow(b1, t))) / (std::sqrt(ve / (1 - std::pow(b2, t))) + eps);
    std::vector<Matrix> g{Matrix::Constant(1, 1, gv)};
    adam.step(p, g);
    EXPECT_NEAR(p[0](0, 0), w, 1e-15);
  }
  EXPECT_EQ(adam.steps(), 6);
}

TEST(Adam, FirstStepMagnitudeIsLearningRate) {
  for (double gv : {1e-3, 0.5, 42.0, -1e3}) {
    std::vector<Matrix> p{Matrix::Zero(1, 1)};
    std::vector<Matrix> g{Matrix::Constant(1, 1, gv)};
    Adam adam(1e-3);
    adam.step(p, g);
    EXPECT_NEAR(std::abs(p[0](0, 0)), 1e-3, 1e-3 * 1e-4) << gv;
  }
}

TEST(Optimizer, NonFiniteGradientAborts) {
  std::vector<Matrix> p{Matrix::Zero(1, 2)};
  std::vector<Matrix> g{Matrix::Zero(1, 2)};
  g[0](0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(sgd_step(p, g, 0.1), NumericError);
  Adam adam;
  EXPECT_THROW(adam.step(p, g), NumericError);
  EXPECT_EQ(p[0], Matrix::Zero(1, 2));
}

TEST(Optimizer, ShapeMismatch) {
  std::vector<Matrix> p{Matrix::Zero(1, 2)};
  std::vector<Matrix> g{Matrix::Zero(2, 1)};
  EXPECT_THROW(sgd_step(p, g, 0.1), DimensionError);
  std::vector<Matrix> none;
  EXPECT_THROW(sgd_step(p, none, 0.1), DimensionError);
}
