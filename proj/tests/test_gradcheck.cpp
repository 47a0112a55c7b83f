#include <gtest/gtest.h>

#include <sstream>

#include "mssgad/gradcheck.hpp"
#include "mssgad/gradcheck_suite.hpp"

using namespace mssgad;

TEST(FiniteDiff, SumOfParams) {
  const ScalarFn f = [](Tape&, const std::vector<Var>& p) {
    return ops::add(ops::sum(p[0]), ops::sum(p[1]));
  };
  Rng rng(1);
  const std::vector<Matrix> params{detail::random_matrix(rng, 3, 2),
                                   detail::random_matrix(rng, 1, 4)};
  for (const Matrix& g : tape_gradients(f, params)) {
    EXPECT_EQ(g, Matrix::Ones(g.rows(), g.cols()));
  }
  const GradCheckResult r = finite_diff_check(f, params, 1e-5);
  EXPECT_LT(r.max_rel_error, 1e-8);
  EXPECT_EQ(r.coordinates, 10u);
}

// x^T A x with symmetric A; closed-form gradient 2 A x.
TEST(FiniteDiff, QuadraticForm) {
  Rng rng(2);
  Matrix a = detail::random_matrix(rng, 4, 4);
  a = (a + a.transpose()).eval();
  const Matrix x = detail::random_matrix(rng, 4, 1);
  const ScalarFn f = [&a](Tape& t, const std::vector<Var>& p) {
    return ops::sum(ops::hadamard(p[0], ops::matmul(t.constant(a), p[0])));
  };
  const Matrix expected = 2.0 * a * x;
  const Matrix g = tape_gradients(f, {x})[0];
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(g(i, 0), expected(i, 0), 1e-13);
  EXPECT_LT(finite_diff_check(f, {x}, 1e-4).max_rel_error, 1e-6);
}

TEST(FiniteDiff, DeadReluRegion) {
  const ScalarFn f = [](Tape&, const std::vector<Var>& p) { return ops::sum(ops::relu(p[0])); };
  const Matrix x = Matrix::Constant(2, 2, -0.5);
  EXPECT_EQ(tape_gradients(f, {x})[0], Matrix::Zero(2, 2));
  const GradCheckResult r = finite_diff_check(f, {x}, 1e-5);
  EXPECT_EQ(r.numeric, 0.0);
  EXPECT_EQ(r.max_rel_error, 0.0);
}

TEST(FiniteDiff, RelativeErrorFloor) {
  EXPECT_DOUBLE_EQ(relative_error(1e-9, 0.0), 1e-3);
  EXPECT_DOUBLE_EQ(relative_error(2.0, 1.0), 0.5);
}

TEST(GradCheckSuite, PassesOnAllOps) {
  GradCheckOptions opt;
  opt.seed = 0;
  const GradCheckReport rep = run_gradcheck(opt);
  EXPECT_TRUE(rep.passed()) << rep.worst_case << " " << rep.worst;
  EXPECT_GE(rep.trials, 100u);
  std::vector<std::string> names;
  for (const auto& c : rep.cases) names.push_back(c.name);
  for (const char* expected : {"matmul", "relu", "row_max_pool", "l2_normalize_rows",
                               "pairwise_mean_distance", "loss_p", "loss_n"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), expected), names.end()) << expected;
  }
}

TEST(GradCheckSuite, CatchesBrokenRelu) {
  GradCheckOptions opt;
  opt.trials = 5;
  opt.inject_fault = true;
  const GradCheckReport rep = run_gradcheck(opt);
  EXPECT_FALSE(rep.passed());
  EXPECT_GT(rep.worst, 1e-2);
}

TEST(GradCheckSuite, Deterministic) {
  GradCheckOptions opt;
  opt.seed = 9;
  opt.trials = 4;
  std::ostringstream a, b;
  print_gradcheck_report(a, run_gradcheck(opt));
  print_gradcheck_report(b, run_gradcheck(opt));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str().find("PASS"), std::string::npos);
}
