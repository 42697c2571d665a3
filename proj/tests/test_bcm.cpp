#include <glop/bcm.hpp>
#include <glop/lasso.hpp>
#include <glop/model.hpp>
#include <glop/stacked.hpp>

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace glop;
using glop::testing::random_dataset;

namespace {

GlopPenalty penalty(double lg, double ll, LossScaling s = LossScaling::per_patient_half_n) {
  GlopPenalty p;
  p.lambda_g = lg;
  p.lambda_l = ll;
  p.loss_scaling = s;
  return p;
}

BcmOptions tight() {
  BcmOptions o;
  o.tolerance = 1e-13;
  o.kkt_tolerance = 1e-9;
  o.max_sweeps = 100000;
  return o;
}

}  // namespace

TEST(GlopObjective, HandComputed) {
  // X = [1; 2], y = [1; 0], g = 0.5, L = 0.25: residuals 0.25 and -1.5, SS = 2.3125.
  PatientBlock b{"a", (Matrix(2, 1) << 1.0, 2.0).finished(), (Vector(2) << 1.0, 0.0).finished()};
  const MultiTaskDataset d({b}, {"x"});
  const Vector g = Vector::Constant(1, 0.5);
  const Matrix l = Matrix::Constant(1, 1, 0.25);
  EXPECT_NEAR(glop_objective(d, g, l, penalty(2.0, 4.0, LossScaling::unnormalized)), 4.3125,
              1e-14);
  EXPECT_NEAR(glop_objective(d, g, l, penalty(2.0, 4.0)), 0.25 * 2.3125 + 2.0, 1e-14);
}

TEST(GlopPenalty, ValidationAndScales) {
  auto p = penalty(1.0, 2.0);
  EXPECT_DOUBLE_EQ(p.loss_scale(4), 0.125);
  p.loss_scaling = LossScaling::unnormalized;
  EXPECT_DOUBLE_EQ(p.loss_scale(4), 1.0);
  EXPECT_THROW(penalty(-1.0, 1.0).validate(2), ArgumentError);
  p.global_feature_weights = {1.0};
  EXPECT_THROW(p.validate(2), ArgumentError);
  p.global_feature_weights = {1.0, -1.0};
  EXPECT_THROW(p.validate(2), ArgumentError);
  EXPECT_EQ(loss_scaling_from_string("half-n"), LossScaling::per_patient_half_n);
  EXPECT_EQ(loss_scaling_from_string(to_string(LossScaling::unnormalized)), LossScaling::unnormalized);
  EXPECT_THROW(loss_scaling_from_string("mean"), ArgumentError);
}

TEST(Bcm, ObjectiveNonIncreasingEverySweep) {
  const auto d = random_dataset(5, 4, 12, 1);
  auto o = tight();
  o.record_objective_trace = true;
  const auto r = solve_glop_bcm_detailed(d, penalty(0.3, 0.5), o);
  ASSERT_GE(r.objective_trace.size(), 2u);
  for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
    EXPECT_LE(r.objective_trace[i], r.objective_trace[i - 1] + 1e-12);
  }
  EXPECT_TRUE(r.model.converged);
  EXPECT_LE(r.model.objective, r.objective_trace.front());
}

TEST(Bcm, JointKktAtConvergence) {
  const auto d = random_dataset(6, 3, 15, 2);
  const auto pen = penalty(0.2, 0.4);
  const auto m = solve_glop_bcm(d, pen, tight());
  EXPECT_TRUE(m.converged);
  EXPECT_LE(glop_kkt_residuals(d, m.global, m.local, pen).maxCoeff(),
            1e-8 * std::max(1.0, glop_zero_gradient_scale(d, pen)));
}

TEST(Bcm, FixedPointOfBothBlockSteps) {
  const auto d = random_dataset(4, 3, 10, 3);
  const auto pen = penalty(0.5, 0.7);
  const auto m = solve_glop_bcm(d, pen, tight());
  const Vector g = solve_global_step(d, m.local, pen, m.global);
  const Matrix l = solve_local_step(d, m.global, pen, m.local);
  EXPECT_LE((g - m.global).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_LE((l - m.local).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Bcm, AgreesWithSingleLassoWhenUnique) {
  for (std::uint64_t seed = 10; seed < 16; ++seed) {
    const auto d = random_dataset(4, 3, 20, seed);
    for (auto scaling : {LossScaling::per_patient_half_n, LossScaling::unnormalized}) {
      const double lg = scaling == LossScaling::unnormalized ? 4.0 : 0.1;
      const auto pen = penalty(lg, 2.0 * lg, scaling);
      const auto a = solve_glop_bcm(d, pen, tight());
      const auto b = solve_glop_single_lasso(d, pen);
      EXPECT_LE((a.global - b.global).cwiseAbs().maxCoeff(), 1e-6) << seed;
      EXPECT_LE((a.local - b.local).cwiseAbs().maxCoeff(), 1e-6) << seed;
      EXPECT_NEAR(a.objective, b.objective, 1e-8 * (1.0 + a.objective));
    }
  }
}

TEST(Bcm, HugeGlobalPenaltyReducesToPerPatientLassos) {
  const auto d = random_dataset(4, 3, 10, 4);
  const auto pen = penalty(1e6, 0.3);
  const auto m = solve_glop_bcm(d, pen, tight());
  EXPECT_EQ(m.global.cwiseAbs().maxCoeff(), 0.0);
  for (std::size_t k = 0; k < d.num_patients(); ++k) {
    LassoProblem lp{d.block(k).design, d.block(k).targets, Vector::Constant(4, 0.3),
                    pen.loss_scale(d.block(k).rows())};
    LassoOptions o;
    o.tolerance = 1e-13;
    const auto sol = solve_weighted_lasso(lp, o);
    EXPECT_LE((sol.coefficients - m.local.col(static_cast<Index>(k))).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Bcm, HugeLocalPenaltyReducesToPooledLasso) {
  const auto d = random_dataset(4, 3, 10, 5);
  const auto pen = penalty(0.2, 1e6, LossScaling::unnormalized);
  const auto m = solve_glop_bcm(d, pen, tight());
  EXPECT_EQ(m.local.cwiseAbs().maxCoeff(), 0.0);
  LassoProblem lp{d.pooled_design(), d.pooled_targets(), Vector::Constant(4, 0.2), 1.0};
  LassoOptions o;
  o.tolerance = 1e-13;
  EXPECT_LE((solve_weighted_lasso(lp, o).coefficients - m.global).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Bcm, UnequalPatientSizesSupported) {
  const auto d = random_dataset(3, 4, 8, 6, true);
  const auto pen = penalty(0.2, 0.4);
  const auto m = solve_glop_bcm(d, pen, tight());
  EXPECT_TRUE(m.converged);
  EXPECT_THROW(solve_glop_single_lasso(d, pen), UnsupportedShapeError);
}

TEST(Bcm, WarmStartFromAnyPointReachesSameFit) {
  const auto d = random_dataset(4, 4, 16, 7);
  const auto pen = penalty(0.1, 0.3);
  const auto a = solve_glop_bcm(d, pen, tight());
  auto o = tight();
  o.init_global = Vector::Constant(4, 3.0);
  o.init_local = Matrix::Constant(4, 4, -2.0);
  const auto b = solve_glop_bcm(d, pen, o);
  EXPECT_LE((a.global - b.global).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE((a.local - b.local).cwiseAbs().maxCoeff(), 1e-6);
  o.init_global = Vector::Zero(3);
  EXPECT_THROW(solve_glop_bcm(d, pen, o), ArgumentError);
}

TEST(Bcm, UnpenalizedGlobalInterceptIsNotShrunk) {
  const auto sc = generate_outlier_scenario(6, 20, 3, 0.0, 0.0, 3);
  const Index ic = *sc.dataset.intercept_column();
  auto pen = penalty(1e4, 1e4, LossScaling::unnormalized);
  pen.global_feature_weights.assign(4, 1.0);
  pen.global_feature_weights[static_cast<std::size_t>(ic)] = 0.0;
  const auto m = solve_glop_bcm(sc.dataset, pen, tight());
  // Everything else is zeroed, so the intercept is the pooled mean of y.
  EXPECT_NEAR(m.global(ic), sc.dataset.pooled_targets().mean(), 1e-8);
  EXPECT_EQ(m.global.head(3).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Model, PredictionsAndMse) {
  const auto s = generate_small_example(2);
  GlopModel m = GlopModel::zero(s.dataset, penalty(1.0, 1.0));
  m.global = s.population.coefficients[0];
  for (Index k = 0; k < 5; ++k) m.local.col(k) = s.population.coefficients[k] - m.global;
  const auto& b = s.dataset.block(4);
  EXPECT_LE((predict(m, b, Index{4}) - b.design * s.population.coefficients[4]).norm(), 1e-12);
  EXPECT_LE((predict(m, b) - b.design * m.global).norm(), 1e-12);
  const auto test = holdout_testset(s.population, 4000, 77);
  // With the true coefficients only the unit-variance noise remains.
  EXPECT_NEAR(evaluate_mse(m, test), 1.0, 0.05);
  EXPECT_GT(evaluate_global_mse(m, test), 5.0);
  EXPECT_NEAR(mse((Vector(2) << 1.0, 2.0).finished(), (Vector(2) << 0.0, 0.0).finished()), 2.5,
              1e-15);
}
