#include <glop/lasso.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace glop;

namespace {

LassoProblem random_problem(std::mt19937_64& rng, Index n, Index m, bool zero_weights) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  LassoProblem p;
  p.design.resize(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) p.design(i, j) = z(rng);
  p.response.resize(n);
  for (Index i = 0; i < n; ++i) p.response(i) = 2.0 * z(rng);
  p.penalty_weights.resize(m);
  for (Index j = 0; j < m; ++j) p.penalty_weights(j) = u(rng);
  if (zero_weights) p.penalty_weights(0) = 0.0;
  p.loss_scale = 0.5;
  return p;
}

}  // namespace

TEST(SoftThreshold, Values) {
  EXPECT_DOUBLE_EQ(soft_threshold(3.0, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(soft_threshold(-3.0, 1.0), -2.0);
  EXPECT_DOUBLE_EQ(soft_threshold(0.5, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(soft_threshold(-1.0, 1.0), 0.0);
}

TEST(Lasso, SingleColumnClosedForm) {
  // minimize 0.5 * ((3 - b)^2 + (1 - b)^2) + |b|: stationary at 2b - 4 + 1 = 0, b = 1.5.
  LassoProblem p;
  p.design = Matrix::Ones(2, 1);
  p.response = (Vector(2) << 3.0, 1.0).finished();
  p.penalty_weights = Vector::Ones(1);
  p.loss_scale = 0.5;
  LassoOptions o;
  o.tolerance = 1e-14;
  const auto sol = solve_weighted_lasso(p, o);
  EXPECT_NEAR(sol.coefficients(0), 1.5, 1e-14);
  EXPECT_NEAR(sol.objective, 2.75, 1e-13);
  EXPECT_TRUE(sol.converged);

  // Penalty large enough to zero it: |grad at 0| = 4 <= 5.
  p.penalty_weights(0) = 5.0;
  EXPECT_EQ(solve_weighted_lasso(p, o).coefficients(0), 0.0);
}

TEST(Lasso, UnnormalizedLossScale) {
  // minimize (3 - b)^2 + (1 - b)^2 + 2|b|: 2(2b - 4) + 2 = 0, b = 1.5.
  LassoProblem p;
  p.design = Matrix::Ones(2, 1);
  p.response = (Vector(2) << 3.0, 1.0).finished();
  p.penalty_weights = Vector::Constant(1, 2.0);
  p.loss_scale = 1.0;
  EXPECT_NEAR(solve_weighted_lasso(p).coefficients(0), 1.5, 1e-10);
}

TEST(Lasso, OrthogonalDesignSeparates) {
  // Columns e1, e2 of R^3: each coordinate is its own soft threshold.
  LassoProblem p;
  p.design = Matrix::Zero(3, 2);
  p.design(0, 0) = 1.0;
  p.design(1, 1) = 1.0;
  p.response = (Vector(3) << 2.0, -0.3, 7.0).finished();
  p.penalty_weights = (Vector(2) << 1.0, 1.0).finished();
  p.loss_scale = 0.5;
  const auto sol = solve_weighted_lasso(p);
  EXPECT_NEAR(sol.coefficients(0), 1.0, 1e-12);
  EXPECT_EQ(sol.coefficients(1), 0.0);
}

TEST(Lasso, UnpenalizedColumnIsLeastSquares) {
  LassoProblem p;
  p.design = (Matrix(3, 1) << 1.0, 2.0, 2.0).finished();
  p.response = (Vector(3) << 1.0, 1.0, 4.0).finished();
  p.penalty_weights = Vector::Zero(1);
  // x'y / x'x = (1 + 2 + 8) / 9
  EXPECT_NEAR(solve_weighted_lasso(p).coefficients(0), 11.0 / 9.0, 1e-12);
}

TEST(Lasso, ZeroColumnFixedAtZeroWithWarning) {
  LassoProblem p;
  p.design = Matrix::Zero(3, 2);
  p.design.col(1) << 1.0, 1.0, 1.0;
  p.response = Vector::Ones(3);
  p.penalty_weights = Vector::Zero(2);
  const auto sol = solve_weighted_lasso(p);
  EXPECT_EQ(sol.coefficients(0), 0.0);
  EXPECT_NEAR(sol.coefficients(1), 1.0, 1e-12);
  ASSERT_EQ(sol.warnings.size(), 1u);
  const auto gsol = solve_weighted_lasso(to_gram(p));
  EXPECT_EQ(gsol.warnings.size(), 1u);
}

TEST(Lasso, ValidationErrors) {
  LassoProblem p;
  p.design = Matrix::Ones(2, 2);
  p.response = Vector::Ones(2);
  p.penalty_weights = Vector::Ones(1);
  EXPECT_THROW(solve_weighted_lasso(p), ArgumentError);
  p.penalty_weights = (Vector(2) << 1.0, -1.0).finished();
  EXPECT_THROW(solve_weighted_lasso(p), ArgumentError);
  p.penalty_weights = Vector::Ones(2);
  p.loss_scale = 0.0;
  EXPECT_THROW(solve_weighted_lasso(p), ArgumentError);
  p.loss_scale = 0.5;
  p.response = Vector::Ones(3);
  EXPECT_THROW(solve_weighted_lasso(p), ArgumentError);
  p.response = Vector::Ones(2);
  LassoOptions o;
  o.warm_start = Vector::Zero(3);
  EXPECT_THROW(solve_weighted_lasso(p, o), ArgumentError);
}

TEST(Lasso, MatchesBruteForceOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> rows(1, 8), cols(1, 6);
  LassoOptions o;
  o.tolerance = 1e-13;
  o.max_iterations = 1000000;
  for (int t = 0; t < 60; ++t) {
    const auto p = random_problem(rng, rows(rng), cols(rng), t % 3 == 0);
    const auto oracle = brute_force_lasso_oracle(p);
    const auto cd = solve_weighted_lasso(p, o);
    EXPECT_NEAR(cd.objective, oracle.objective, 1e-8 * (1.0 + oracle.objective)) << "problem " << t;
    EXPECT_LE((p.design * (cd.coefficients - oracle.coefficients)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Lasso, ObjectiveNonIncreasingAndKktAtConvergence) {
  std::mt19937_64 rng(7);
  LassoOptions o;
  o.tolerance = 1e-12;
  o.record_objective_trace = true;
  for (int t = 0; t < 20; ++t) {
    const auto p = random_problem(rng, 30, 12, t % 2 == 0);
    const auto sol = solve_weighted_lasso(p, o);
    ASSERT_GE(sol.objective_trace.size(), 2u);
    for (std::size_t i = 1; i < sol.objective_trace.size(); ++i) {
      EXPECT_LE(sol.objective_trace[i], sol.objective_trace[i - 1] + 1e-12);
    }
    EXPECT_TRUE(sol.converged);
    EXPECT_LE(kkt_residuals(p, sol.coefficients).maxCoeff(), 1e-8);
  }
}

TEST(Lasso, GramFormAgreesWithResidualForm) {
  std::mt19937_64 rng(8);
  LassoOptions o;
  o.tolerance = 1e-13;
  for (int t = 0; t < 10; ++t) {
    const auto p = random_problem(rng, 20, 8, false);
    const auto a = solve_weighted_lasso(p, o);
    const auto b = solve_weighted_lasso(to_gram(p), o);
    EXPECT_LE((a.coefficients - b.coefficients).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(a.objective, b.objective, 1e-9);
    EXPECT_NEAR(lasso_objective(p, a.coefficients), lasso_objective(to_gram(p), a.coefficients),
                1e-9);
  }
}

TEST(Lasso, WarmStartReachesSameSolution) {
  std::mt19937_64 rng(9);
  const auto p = random_problem(rng, 25, 10, false);
  LassoOptions o;
  o.tolerance = 1e-13;
  const auto cold = solve_weighted_lasso(p, o);
  o.warm_start = Vector::Constant(10, 5.0);
  const auto warm = solve_weighted_lasso(p, o);
  EXPECT_LE((cold.coefficients - warm.coefficients).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Lasso, KktResidualsDetectNonOptimalPoints) {
  LassoProblem p;
  p.design = Matrix::Ones(2, 1);
  p.response = (Vector(2) << 3.0, 1.0).finished();
  p.penalty_weights = Vector::Ones(1);
  p.loss_scale = 0.5;
  // At b = 0 the gradient is -4 and the weight 1, so the violation is 3.
  EXPECT_NEAR(kkt_residuals(p, Vector::Zero(1))(0), 3.0, 1e-14);
  EXPECT_NEAR(kkt_residuals(p, Vector::Constant(1, 1.5))(0), 0.0, 1e-14);
}

TEST(Oracle, CapacityLimit) {
  LassoProblem p;
  p.design = Matrix::Ones(2, kOracleMaxColumns + 1);
  p.response = Vector::Ones(2);
  p.penalty_weights = Vector::Ones(kOracleMaxColumns + 1);
  EXPECT_THROW(brute_force_lasso_oracle(p), CapacityError);
}
