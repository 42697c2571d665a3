#include <glop/dirty_model.hpp>
#include <glop/lasso.hpp>

#include <Eigen/QR>
#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace glop;
using glop::testing::random_dataset;

TEST(L1Ball, HandProjections) {
  // (3, 1) onto radius 2: shift by 1 gives (2, 0).
  EXPECT_LE((project_l1_ball((Vector(2) << 3.0, 1.0).finished(), 2.0) -
             (Vector(2) << 2.0, 0.0).finished())
                .norm(),
            1e-14);
  EXPECT_LE((project_l1_ball((Vector(2) << 3.0, -3.0).finished(), 3.0) -
             (Vector(2) << 1.5, -1.5).finished())
                .norm(),
            1e-14);
  const Vector inside = (Vector(3) << 0.5, -0.5, 0.25).finished();
  EXPECT_EQ(project_l1_ball(inside, 2.0), inside);
  EXPECT_EQ(project_l1_ball(inside, 0.0), Vector::Zero(3));
}

TEST(L1Ball, ProxOfMaxNormIsMoreauComplement) {
  const Vector v = (Vector(2) << 3.0, 1.0).finished();
  EXPECT_LE((prox_linf(v, 2.0) - (Vector(2) << 1.0, 1.0).finished()).norm(), 1e-14);
  // tau >= ||v||_1 collapses to zero.
  EXPECT_LE(prox_linf(v, 4.0).norm(), 1e-14);
  // Optimality by comparison against nearby points.
  const Vector x = prox_linf(v, 2.0);
  auto f = [&](const Vector& z) { return 0.5 * (z - v).squaredNorm() + 2.0 * z.cwiseAbs().maxCoeff(); };
  for (double dx : {-1e-3, 1e-3})
    for (double dy : {-1e-3, 1e-3}) EXPECT_GE(f(x + (Vector(2) << dx, dy).finished()), f(x));
}

TEST(Dirty, ObjectiveNonIncreasing) {
  const auto d = random_dataset(4, 3, 10, 1);
  DirtyModelOptions o;
  o.record_objective_trace = true;
  const auto m = solve_dirty_model(d, 3.0, 2.0, o);
  ASSERT_GE(m.objective_trace.size(), 2u);
  for (std::size_t i = 1; i < m.objective_trace.size(); ++i)
    EXPECT_LE(m.objective_trace[i], m.objective_trace[i - 1] * (1.0 + 1e-12));
  EXPECT_TRUE(m.converged);
  EXPECT_NEAR(m.objective, dirty_objective(d, m.b, m.s, 3.0, 2.0), 1e-9);
}

TEST(Dirty, SparsePartVanishesWhenRowPenaltyIsSmaller) {
  // lambda_B ||S||_{1,inf} <= lambda_S ||S||_{1,1}, so moving S into B never hurts.
  const auto d = random_dataset(4, 4, 12, 2);
  const auto m = solve_dirty_model(d, 2.0, 5.0);
  EXPECT_LE(m.s.cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_GT(m.b.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Dirty, SinglePatientIsLasso) {
  const auto d = random_dataset(5, 1, 15, 3);
  DirtyModelOptions o;
  o.tolerance = 1e-14;
  const auto m = solve_dirty_model(d, 4.0, 6.0, o);
  LassoProblem p{d.block(0).design, d.block(0).targets, Vector::Constant(5, 4.0), 1.0};
  LassoOptions lo;
  lo.tolerance = 1e-14;
  const auto l = solve_weighted_lasso(p, lo);
  EXPECT_LE((m.patient_coefficients(0) - l.coefficients).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_NEAR(m.objective, l.objective, 1e-7 * (1.0 + l.objective));
}

TEST(Dirty, PlainAndAcceleratedAgree) {
  const auto d = random_dataset(3, 3, 20, 4);
  DirtyModelOptions o;
  o.tolerance = 1e-14;
  const auto a = solve_dirty_model(d, 8.0, 3.0, o);
  o.accelerated = false;
  o.max_iterations = 1000000;
  const auto b = solve_dirty_model(d, 8.0, 3.0, o);
  EXPECT_NEAR(a.objective, b.objective, 1e-8 * a.objective);
}

TEST(Dirty, ZeroPenaltiesGivePerPatientLeastSquares) {
  const auto d = random_dataset(2, 2, 10, 5);
  DirtyModelOptions o;
  o.tolerance = 1e-15;
  o.max_iterations = 1000000;
  const auto m = solve_dirty_model(d, 0.0, 0.0, o);
  for (Index k = 0; k < 2; ++k) {
    const auto& blk = d.block(static_cast<std::size_t>(k));
    const Vector ls = blk.design.colPivHouseholderQr().solve(blk.targets);
    EXPECT_LE((m.patient_coefficients(k) - ls).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Dirty, EvaluateAndValidate) {
  const auto d = random_dataset(2, 2, 6, 6);
  DirtyModel m;
  m.b = Matrix::Zero(2, 2);
  m.s = Matrix::Zero(2, 2);
  double ss = 0.0;
  for (const auto& b : d.blocks()) ss += b.targets.squaredNorm();
  EXPECT_NEAR(evaluate_mse(m, d), ss / 12.0, 1e-12);
  EXPECT_THROW(solve_dirty_model(d, -1.0, 1.0), ArgumentError);
}
