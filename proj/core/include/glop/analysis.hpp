#pragma once

#include <glop/bcm.hpp>
#include <glop/dataset.hpp>
#include <glop/dirty_model.hpp>
#include <glop/lasso.hpp>
#include <glop/model.hpp>
#include <glop/selection.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace glop {

// ---------------------------------------------------------------------------
// Predictive outliers

struct OutlierReport {
  std::vector<std::string> patient_ids;
  std::vector<double> local_mass;  ///< sum_j |L_jk| per patient
  double percentile = 90.0;
  double threshold = 0.0;
  std::vector<std::string> flagged;
  std::vector<Index> flagged_indices;
  /// Nonzero local coefficients per patient as (feature name, value).
  std::vector<std::vector<std::pair<std::string, double>>> nonzero_local;
  std::string rule = "flag local_mass > nearest-rank percentile of local_mass";
  std::vector<std::string> notes;
};

/// Threshold is the ceil(percentile/100 * kappa)-th smallest local mass; patients
/// strictly above it are flagged. percentile must lie in (0, 100].
OutlierReport detect_outliers(const GlopModel& model, double percentile = 90.0);

// ---------------------------------------------------------------------------
// Baselines

/// One lasso over all patients pooled, with the same per-patient loss scaling as gLOP.
struct PooledLasso {
  Vector coefficients;
  double lambda = 0.0;
  LossScaling loss_scaling = LossScaling::per_patient_half_n;
  double objective = 0.0;
  bool converged = false;
  std::vector<std::string> feature_names;
};

PooledLasso fit_pooled_lasso(const MultiTaskDataset& dataset, double lambda,
                             LossScaling scaling = LossScaling::per_patient_half_n,
                             const LassoOptions& options = {});
double evaluate_mse(const PooledLasso& model, const MultiTaskDataset& testset);

/// CV over lambda with the same folds and score as cv_grid_search. Cells carry
/// lambda in lambda_g and 0 in lambda_l.
SelectionResult cv_pooled_lasso(const MultiTaskDataset& dataset,
                                 const std::vector<double>& lambdas, int folds,
                                 std::uint64_t seed, LossScaling scaling, int threads = 1);

/// CV for the dirty model; cells carry lambda_B in lambda_g and lambda_S in lambda_l,
/// so the grid constraint reads lambda_B <= lambda_S.
SelectionResult cv_dirty_model(const MultiTaskDataset& dataset, const CvGrid& grid,
                               const DirtyModelOptions& options = {}, int threads = 1);

// ---------------------------------------------------------------------------
// Significance

struct TTestResult {
  double statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;  ///< two-sided
};

/// Independent two-sample Student t-test with pooled variance.
TTestResult independent_t_test(const std::vector<double>& a, const std::vector<double>& b);

double sample_mean(const std::vector<double>& v);
/// Unbiased (n - 1) standard deviation.
double sample_sd(const std::vector<double>& v);

// ---------------------------------------------------------------------------
// Multi-method benchmark on the three-type population

enum class Method { glop, dirty, lasso };
std::string to_string(Method method);
Method method_from_string(const std::string& name);

struct BenchmarkConfig {
  Index p = 16;
  Index kappa = 16;
  Index n = 64;  ///< training rows per patient
  int trials = 20;
  std::uint64_t seed = 1;
  Index n_test = 1000;  ///< holdout rows per patient
  LossScaling loss_scaling = LossScaling::unnormalized;
  CvGrid grid;
  std::vector<Method> methods{Method::glop, Method::dirty, Method::lasso};
  int threads = 1;
  /// Solver settings used inside CV; the final fit uses the same.
  BcmOptions bcm = default_cv_bcm_options();
  DirtyModelOptions dirty = default_cv_dirty_options();

  static BcmOptions default_cv_bcm_options();
  static DirtyModelOptions default_cv_dirty_options();
};

struct TrialOutcome {
  int trial = 0;
  std::uint64_t seed = 0;
  std::vector<double> mse;          ///< aligned with config.methods
  std::vector<GridCell> chosen;     ///< aligned with config.methods
  /// Dirty model only: B and S were both nonzero at the chosen cell.
  std::optional<bool> dirty_both_nonzero;
};

struct MethodSummary {
  Method method = Method::glop;
  double mean_mse = 0.0;
  double sd_mse = 0.0;
  std::vector<double> per_trial;
};

struct PairwiseTest {
  Method first = Method::glop;
  Method second = Method::dirty;
  TTestResult test;
};

struct BenchmarkReport {
  BenchmarkConfig config;
  std::vector<TrialOutcome> trials;
  std::vector<MethodSummary> summaries;
  /// gLOP against every other method that ran.
  std::vector<PairwiseTest> tests;
  std::vector<std::string> notes;

  const MethodSummary* summary(Method method) const;
};

/// Per trial: draw training data and a holdout from the tau population, select each
/// method's penalties by stratified CV, refit on all training rows, score the holdout.
BenchmarkReport run_table1_benchmark(const BenchmarkConfig& config);

/// Seed of trial t, derived from the base seed.
std::uint64_t trial_seed(std::uint64_t base, int trial);

// ---------------------------------------------------------------------------
// Outlier experiment: Y = 1 + X + cZ + eps, detection from X and Y only.

enum class PenaltySelection { bic, cv, fixed };
std::string to_string(PenaltySelection selection);
PenaltySelection penalty_selection_from_string(const std::string& name);

struct OutlierExperimentConfig {
  Index kappa = 16;
  Index n = 10;
  Index p = 32;
  double c = 10.0;
  double z_probability = 0.2;
  int seeds = 50;
  std::uint64_t seed = 1;
  double percentile = 50.0;
  PenaltySelection selection = PenaltySelection::bic;
  GridCell fixed_penalty{5.0, 10.0};
  CvGrid grid;
  LossScaling loss_scaling = LossScaling::unnormalized;
  Index n_test = 1000;
  int threads = 1;
  BcmOptions bcm = BenchmarkConfig::default_cv_bcm_options();
};

struct OutlierSeedOutcome {
  std::uint64_t seed = 0;
  std::vector<std::string> true_outliers;
  std::vector<std::string> flagged;
  bool exact_match = false;
  GridCell chosen;
  std::vector<std::string> flagged_with_z;
  GridCell chosen_with_z;
  double global_mse = 0.0;         ///< g-only holdout MSE without Z
  double global_mse_with_z = 0.0;  ///< g-only holdout MSE with Z as a feature
  bool z_resolves = false;         ///< flagged_with_z empty and global MSE improved
};

struct OutlierExperimentReport {
  OutlierExperimentConfig config;
  std::vector<OutlierSeedOutcome> outcomes;
  double exact_match_rate = 0.0;
  double z_resolves_rate = 0.0;
};

OutlierExperimentReport run_outlier_experiment(const OutlierExperimentConfig& config);

}  // namespace glop
