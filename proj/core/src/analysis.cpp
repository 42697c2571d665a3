#include <glop/analysis.hpp>

#include "parallel.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace glop {

OutlierReport detect_outliers(const GlopModel& model, double percentile) {
  if (!(percentile > 0.0) || percentile > 100.0) {
    throw ArgumentError("percentile must lie in (0, 100]");
  }
  const Index kappa = model.num_patients();
  if (kappa < 1) throw ArgumentError("model has no patients");

  OutlierReport report;
  report.percentile = percentile;
  report.patient_ids = model.patient_ids;
  if (report.patient_ids.empty()) {
    for (Index k = 0; k < kappa; ++k) report.patient_ids.push_back(std::to_string(k));
  }
  for (Index k = 0; k < kappa; ++k) {
    report.local_mass.push_back(model.local.col(k).cwiseAbs().sum());
    std::vector<std::pair<std::string, double>> nz;
    for (Index j = 0; j < model.num_features(); ++j) {
      const double v = model.local(j, k);
      if (v == 0.0) continue;
      const std::string name = static_cast<std::size_t>(j) < model.feature_names.size()
                                   ? model.feature_names[static_cast<std::size_t>(j)]
                                   : std::to_string(j);
      nz.emplace_back(name, v);
    }
    report.nonzero_local.push_back(std::move(nz));
  }

  std::vector<double> sorted = report.local_mass;
  std::sort(sorted.begin(), sorted.end());
  const double position = percentile / 100.0 * static_cast<double>(kappa);
  auto rank = static_cast<Index>(std::ceil(position - 1e-9));
  rank = std::clamp<Index>(rank, 1, kappa);
  report.threshold = sorted[static_cast<std::size_t>(rank - 1)];

  for (Index k = 0; k < kappa; ++k) {
    if (report.local_mass[static_cast<std::size_t>(k)] > report.threshold) {
      report.flagged.push_back(report.patient_ids[static_cast<std::size_t>(k)]);
      report.flagged_indices.push_back(k);
    }
  }
  if (sorted.back() == 0.0) report.notes.push_back("every local mass is zero; nothing flagged");
  return report;
}

PooledLasso fit_pooled_lasso(const MultiTaskDataset& dataset, double lambda, LossScaling scaling,
                             const LassoOptions& options) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ArgumentError("lambda must be >= 0");
  GlopPenalty scale_only;
  scale_only.loss_scaling = scaling;
  const Index p = dataset.num_features();
  GramLassoProblem prob;
  prob.gram = Matrix::Zero(p, p);
  prob.xty = Vector::Zero(p);
  prob.loss_scale = 1.0;
  for (const auto& b : dataset.blocks()) {
    const double s = scale_only.loss_scale(b.rows());
    prob.gram.noalias() += s * (b.design.transpose() * b.design);
    prob.xty.noalias() += s * (b.design.transpose() * b.targets);
    prob.yty += s * b.targets.squaredNorm();
  }
  prob.penalty_weights = Vector::Constant(p, lambda);
  const LassoSolution sol = solve_weighted_lasso(prob, options);

  PooledLasso out;
  out.coefficients = sol.coefficients;
  out.lambda = lambda;
  out.loss_scaling = scaling;
  out.objective = sol.objective;
  out.converged = sol.converged;
  out.feature_names = dataset.feature_names();
  return out;
}

double evaluate_mse(const PooledLasso& model, const MultiTaskDataset& testset) {
  if (testset.num_features() != model.coefficients.size()) {
    throw ArgumentError("testset feature count does not match the lasso model");
  }
  double sse = 0.0;
  for (const auto& b : testset.blocks()) {
    sse += (b.targets - b.design * model.coefficients).squaredNorm();
  }
  return sse / static_cast<double>(testset.total_rows());
}

SelectionResult cv_pooled_lasso(const MultiTaskDataset& dataset,
                                 const std::vector<double>& lambdas, int folds,
                                 std::uint64_t seed, LossScaling scaling, int threads) {
  std::vector<GridCell> cells;
  for (double l : lambdas) cells.push_back({l, 0.0});
  FoldFitter fitter = [&](const FoldSplit& split, const std::vector<GridCell>& cs) {
    std::vector<double> scores(cs.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<std::size_t> order(cs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return cs[a].lambda_g > cs[b].lambda_g; });
    LassoOptions opt;
    for (std::size_t idx : order) {
      try {
        const PooledLasso fit = fit_pooled_lasso(*split.train, cs[idx].lambda_g, scaling, opt);
        opt.warm_start = fit.coefficients;
        double sse = 0.0;
        Index count = 0;
        for (const auto& b : split.validation) {
          if (b.rows() == 0) continue;
          sse += (b.targets - b.design * fit.coefficients).squaredNorm();
          count += b.rows();
        }
        scores[idx] = sse / static_cast<double>(count);
      } catch (const Error&) {
      }
    }
    return scores;
  };
  SelectionResult result = cross_validate(dataset, cells, folds, seed, fitter, threads);
  result.loss_scaling = scaling;
  return result;
}

SelectionResult cv_dirty_model(const MultiTaskDataset& dataset, const CvGrid& grid,
                               const DirtyModelOptions& options, int threads) {
  grid.validate();
  const std::vector<GridCell> cells = grid.cells();
  if (cells.empty()) throw SelectionError("grid is empty after applying the constraint");
  const std::vector<std::size_t> order = warm_start_order(cells);

  FoldFitter fitter = [&](const FoldSplit& split, const std::vector<GridCell>& cs) {
    std::vector<double> scores(cs.size(), std::numeric_limits<double>::quiet_NaN());
    DirtyModelOptions opt = options;
    for (std::size_t idx : order) {
      try {
        const DirtyModel fit = solve_dirty_model(*split.train, cs[idx].lambda_g,
                                                 cs[idx].lambda_l, opt);
        opt.init_b = fit.b;
        opt.init_s = fit.s;
        const Vector fallback = (fit.b + fit.s).rowwise().mean();
        double sse = 0.0;
        Index count = 0;
        for (std::size_t k = 0; k < split.validation.size(); ++k) {
          const PatientBlock& b = split.validation[k];
          if (b.rows() == 0) continue;
          const Vector beta = split.train_index[k]
                                  ? fit.patient_coefficients(*split.train_index[k])
                                  : fallback;
          sse += (b.targets - b.design * beta).squaredNorm();
          count += b.rows();
        }
        const double v = sse / static_cast<double>(count);
        if (std::isfinite(v)) scores[idx] = v;
      } catch (const Error&) {
      }
    }
    return scores;
  };
  SelectionResult result = cross_validate(dataset, cells, grid.folds, grid.seed, fitter, threads);
  result.loss_scaling = LossScaling::unnormalized;
  return result;
}

double sample_mean(const std::vector<double>& v) {
  if (v.empty()) throw ArgumentError("mean of an empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = sample_mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

TTestResult independent_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) throw ArgumentError("t-test needs at least two values per group");
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  const double va = sample_sd(a) * sample_sd(a);
  const double vb = sample_sd(b) * sample_sd(b);
  const double df = na + nb - 2.0;
  const double pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / df;
  const double se = std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  const double diff = sample_mean(a) - sample_mean(b);

  TTestResult r;
  r.degrees_of_freedom = df;
  if (se == 0.0) {
    r.statistic = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    r.p_value = diff == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.statistic = diff / se;
  const boost::math::students_t dist(df);
  r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.statistic)));
  return r;
}

std::string to_string(Method method) {
  switch (method) {
    case Method::glop:
      return "glop";
    case Method::dirty:
      return "dirty";
    case Method::lasso:
      return "lasso";
  }
  return "glop";
}

Method method_from_string(const std::string& name) {
  for (auto m : {Method::glop, Method::dirty, Method::lasso}) {
    if (to_string(m) == name) return m;
  }
  throw ArgumentError("unknown method '" + name + "' (expected glop, dirty or lasso)");
}

BcmOptions BenchmarkConfig::default_cv_bcm_options() {
  BcmOptions o;
  o.tolerance = 1e-7;
  o.kkt_tolerance = 1e-5;
  o.max_sweeps = 5000;
  // With p > n_k the per-patient Gram matrices are singular and coordinate descent
  // creeps at a 1e-12 coordinate tolerance; 1e-8 leaves CV scores unchanged.
  o.inner_tolerance = 1e-8;
  o.inner_max_iterations = 2000;
  return o;
}

DirtyModelOptions BenchmarkConfig::default_cv_dirty_options() {
  DirtyModelOptions o;
  o.tolerance = 1e-7;
  o.max_iterations = 20000;
  return o;
}

const MethodSummary* BenchmarkReport::summary(Method method) const {
  for (const auto& s : summaries) {
    if (s.method == method) return &s;
  }
  return nullptr;
}

std::uint64_t trial_seed(std::uint64_t base, int trial) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(trial) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

std::uint64_t holdout_seed(std::uint64_t seed) { return trial_seed(seed, -2); }

TrialOutcome run_trial(const BenchmarkConfig& config, int trial) {
  TrialOutcome out;
  out.trial = trial;
  out.seed = trial_seed(config.seed, trial);
  const SyntheticData data = generate_tau_population(config.p, config.kappa, config.n, out.seed);
  const MultiTaskDataset test =
      holdout_testset(data.population, config.n_test, holdout_seed(out.seed));
  CvGrid grid = config.grid;
  grid.seed = out.seed;

  for (Method m : config.methods) {
    switch (m) {
      case Method::glop: {
        SelectionOptions opt;
        opt.loss_scaling = config.loss_scaling;
        opt.bcm = config.bcm;
        const SelectionResult sel = cv_grid_search(data.dataset, grid, opt);
        GlopPenalty penalty;
        penalty.lambda_g = sel.chosen.lambda_g;
        penalty.lambda_l = sel.chosen.lambda_l;
        penalty.loss_scaling = config.loss_scaling;
        const GlopModel model = solve_glop_bcm(data.dataset, penalty, config.bcm);
        out.mse.push_back(evaluate_mse(model, test));
        out.chosen.push_back(sel.chosen);
        break;
      }
      case Method::dirty: {
        const SelectionResult sel = cv_dirty_model(data.dataset, grid, config.dirty);
        const DirtyModel model = solve_dirty_model(data.dataset, sel.chosen.lambda_g,
                                                   sel.chosen.lambda_l, config.dirty);
        out.mse.push_back(evaluate_mse(model, test));
        out.chosen.push_back(sel.chosen);
        out.dirty_both_nonzero = (model.b.array() != 0.0).any() && (model.s.array() != 0.0).any();
        break;
      }
      case Method::lasso: {
        const SelectionResult sel = cv_pooled_lasso(data.dataset, grid.lambda_g_values, grid.folds,
                                                    grid.seed, config.loss_scaling);
        const PooledLasso model =
            fit_pooled_lasso(data.dataset, sel.chosen.lambda_g, config.loss_scaling);
        out.mse.push_back(evaluate_mse(model, test));
        out.chosen.push_back(sel.chosen);
        break;
      }
    }
  }
  return out;
}

}  // namespace

BenchmarkReport run_table1_benchmark(const BenchmarkConfig& config) {
  if (config.trials < 1) throw ArgumentError("trials must be >= 1");
  if (config.methods.empty()) throw ArgumentError("no methods selected");
  if (config.n_test < 1) throw ArgumentError("n_test must be >= 1");
  config.grid.validate();

  BenchmarkReport report;
  report.config = config;
  report.trials.resize(static_cast<std::size_t>(config.trials));
  detail::parallel_for(report.trials.size(), config.threads, [&](std::size_t t) {
    report.trials[t] = run_trial(config, static_cast<int>(t));
  });

  for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
    MethodSummary s;
    s.method = config.methods[mi];
    for (const auto& t : report.trials) s.per_trial.push_back(t.mse[mi]);
    s.mean_mse = sample_mean(s.per_trial);
    s.sd_mse = sample_sd(s.per_trial);
    report.summaries.push_back(std::move(s));
  }
  if (const MethodSummary* g = report.summary(Method::glop); g && config.trials >= 2) {
    for (const auto& s : report.summaries) {
      if (s.method == Method::glop) continue;
      report.tests.push_back({Method::glop, s.method, independent_t_test(g->per_trial, s.per_trial)});
    }
  }
  if (report.summary(Method::dirty)) {
    int both = 0;
    for (const auto& t : report.trials) both += t.dirty_both_nonzero.value_or(false) ? 1 : 0;
    std::ostringstream note;
    note << "dirty model: B and S both nonzero at the selected cell in " << both << " of "
         << config.trials << " trials";
    report.notes.push_back(note.str());
    if (config.loss_scaling != LossScaling::unnormalized) {
      report.notes.push_back("dirty model always uses the unnormalized loss");
    }
  }
  return report;
}

std::string to_string(PenaltySelection selection) {
  switch (selection) {
    case PenaltySelection::bic:
      return "bic";
    case PenaltySelection::cv:
      return "cv";
    case PenaltySelection::fixed:
      return "fixed";
  }
  return "bic";
}

PenaltySelection penalty_selection_from_string(const std::string& name) {
  for (auto s : {PenaltySelection::bic, PenaltySelection::cv, PenaltySelection::fixed}) {
    if (to_string(s) == name) return s;
  }
  throw ArgumentError("unknown selection '" + name + "' (expected bic, cv or fixed)");
}

namespace {

GlopModel select_and_fit(const MultiTaskDataset& data, const OutlierExperimentConfig& config,
                         std::uint64_t seed, GridCell& chosen) {
  SelectionOptions opt;
  opt.loss_scaling = config.loss_scaling;
  opt.bcm = config.bcm;
  CvGrid grid = config.grid;
  grid.seed = seed;
  switch (config.selection) {
    case PenaltySelection::bic:
      chosen = bic_grid_select(data, grid, opt).chosen;
      break;
    case PenaltySelection::cv:
      chosen = cv_grid_search(data, grid, opt).chosen;
      break;
    case PenaltySelection::fixed:
      chosen = config.fixed_penalty;
      break;
  }
  GlopPenalty penalty;
  penalty.lambda_g = chosen.lambda_g;
  penalty.lambda_l = chosen.lambda_l;
  penalty.loss_scaling = config.loss_scaling;
  return solve_glop_bcm(data, penalty, config.bcm);
}

}  // namespace

OutlierExperimentReport run_outlier_experiment(const OutlierExperimentConfig& config) {
  if (config.seeds < 1) throw ArgumentError("seeds must be >= 1");
  OutlierExperimentReport report;
  report.config = config;
  report.outcomes.resize(static_cast<std::size_t>(config.seeds));

  detail::parallel_for(report.outcomes.size(), config.threads, [&](std::size_t i) {
    OutlierSeedOutcome& o = report.outcomes[i];
    o.seed = trial_seed(config.seed, static_cast<int>(i));
    const OutlierScenario sc = generate_outlier_scenario(config.kappa, config.n, config.p,
                                                         config.c, config.z_probability, o.seed);
    const std::vector<std::string> ids = sc.dataset.patient_ids();
    std::vector<double> z(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k) {
      z[k] = sc.is_outlier[k] ? 1.0 : 0.0;
      if (sc.is_outlier[k]) o.true_outliers.push_back(ids[k]);
    }

    const GlopModel model = select_and_fit(sc.dataset, config, o.seed, o.chosen);
    o.flagged = detect_outliers(model, config.percentile).flagged;
    o.exact_match = std::set<std::string>(o.flagged.begin(), o.flagged.end()) ==
                    std::set<std::string>(o.true_outliers.begin(), o.true_outliers.end());

    const SyntheticData with_z = append_patient_covariate(sc.dataset, sc.population, "z", z);
    const GlopModel model_z = select_and_fit(with_z.dataset, config, o.seed, o.chosen_with_z);
    o.flagged_with_z = detect_outliers(model_z, config.percentile).flagged;

    const std::uint64_t test_seed = holdout_seed(o.seed);
    o.global_mse = evaluate_global_mse(model, holdout_testset(sc.population, config.n_test, test_seed));
    o.global_mse_with_z =
        evaluate_global_mse(model_z, holdout_testset(with_z.population, config.n_test, test_seed));
    o.z_resolves = o.flagged_with_z.empty() && o.global_mse_with_z < o.global_mse;
  });

  int exact = 0;
  int resolved = 0;
  for (const auto& o : report.outcomes) {
    exact += o.exact_match ? 1 : 0;
    resolved += o.z_resolves ? 1 : 0;
  }
  report.exact_match_rate = static_cast<double>(exact) / config.seeds;
  report.z_resolves_rate = static_cast<double>(resolved) / config.seeds;
  return report;
}

}  // namespace glop
