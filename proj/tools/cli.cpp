#include "cli.hpp"

#include <glop/analysis.hpp>
#include <glop/bcm.hpp>
#include <glop/dataset.hpp>
#include <glop/io.hpp>
#include <glop/lars.hpp>
#include <glop/model.hpp>
#include <glop/selection.hpp>
#include <glop/stacked.hpp>
#include <glop/uniqueness.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace glop::cli {

namespace {

// Raised for option combinations CLI11 cannot express; maps to exit 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when --require-unique is not met; maps to exit 3.
class UniquenessFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataArgs {
  std::string input;
  std::string patient_column = "patient_id";
  std::string target_column = "y";
  bool add_intercept = false;
  bool unpenalized_intercept = false;
  std::string loss = "half-n";
};

struct GridArgs {
  double grid_max = 100.0;
  double grid_step = 5.0;
  std::vector<double> lambda_g_values;
  std::vector<double> lambda_l_values;
  bool allow_global_above_local = false;
  int folds = 10;
};

struct SolverArgs {
  double tolerance = 1e-9;
  int max_sweeps = 10000;
};

void add_data_options(CLI::App* cmd, DataArgs& a, bool with_loss = true) {
  cmd->add_option("-i,--input", a.input, "Long-format CSV (patient, target, features)")
      ->required();
  cmd->add_option("--patient-column", a.patient_column, "Patient id column")
      ->capture_default_str();
  cmd->add_option("--target-column", a.target_column, "Target column")->capture_default_str();
  cmd->add_flag("--add-intercept", a.add_intercept, "Append a constant-one column");
  cmd->add_flag("--unpenalized-intercept", a.unpenalized_intercept,
                "Leave the global intercept coefficient unpenalized");
  if (with_loss) {
    cmd->add_option("--loss", a.loss, "Loss scaling: unnormalized or half-n")
        ->check(CLI::IsMember({"unnormalized", "half-n"}))
        ->capture_default_str();
  }
}

void add_grid_options(CLI::App* cmd, GridArgs& a, bool with_folds) {
  auto* gmax = cmd->add_option("--grid-max", a.grid_max, "Largest grid value")
                   ->check(CLI::PositiveNumber)
                   ->capture_default_str();
  auto* gstep = cmd->add_option("--grid-step", a.grid_step, "Grid spacing from 0")
                    ->check(CLI::PositiveNumber)
                    ->capture_default_str();
  auto* gvals = cmd->add_option("--lambda-g-values", a.lambda_g_values,
                                "Explicit lambda_g values (comma separated)")
                    ->delimiter(',');
  auto* lvals = cmd->add_option("--lambda-l-values", a.lambda_l_values,
                                "Explicit lambda_L values (comma separated)")
                    ->delimiter(',');
  gvals->needs(lvals);
  lvals->needs(gvals);
  gvals->excludes(gmax)->excludes(gstep);
  lvals->excludes(gmax)->excludes(gstep);
  cmd->add_flag("--allow-global-above-local", a.allow_global_above_local,
                "Keep cells with lambda_g > lambda_L");
  if (with_folds) {
    cmd->add_option("--folds", a.folds, "Cross-validation folds")
        ->check(CLI::Range(2, 1000))
        ->capture_default_str();
  }
}

void add_solver_options(CLI::App* cmd, SolverArgs& a) {
  cmd->add_option("--tolerance", a.tolerance, "Relative objective decrease per BCM sweep")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-sweeps", a.max_sweeps, "BCM sweep limit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

MultiTaskDataset load_data(const DataArgs& a) {
  CsvOptions o;
  o.patient_column = a.patient_column;
  o.target_column = a.target_column;
  o.add_intercept = a.add_intercept;
  try {
    return load_csv(a.input, o);
  } catch (const DataError&) {
    throw;
  } catch (const Error& e) {
    // Dataset invariants broken by file content are data errors too.
    throw DataError(e.what());
  }
}

std::vector<double> feature_weights(const MultiTaskDataset& data, const DataArgs& a) {
  if (!a.unpenalized_intercept) return {};
  if (!data.intercept_column()) {
    throw UsageError("--unpenalized-intercept needs an intercept column (use --add-intercept)");
  }
  std::vector<double> w(static_cast<std::size_t>(data.num_features()), 1.0);
  w[static_cast<std::size_t>(*data.intercept_column())] = 0.0;
  return w;
}

GlopPenalty make_penalty(const MultiTaskDataset& data, const DataArgs& a, double lambda_g,
                         double lambda_l) {
  GlopPenalty pen;
  pen.lambda_g = lambda_g;
  pen.lambda_l = lambda_l;
  pen.loss_scaling = loss_scaling_from_string(a.loss);
  pen.global_feature_weights = feature_weights(data, a);
  return pen;
}

BcmOptions bcm_options(const SolverArgs& s) {
  BcmOptions o;
  o.tolerance = s.tolerance;
  o.max_sweeps = s.max_sweeps;
  return o;
}

std::vector<double> grid_values(double max, double step) {
  std::vector<double> v;
  const auto n = static_cast<long>(std::floor(max / step + 1e-9));
  for (long i = 0; i <= n; ++i) v.push_back(static_cast<double>(i) * step);
  return v;
}

CvGrid make_grid(const GridArgs& a, std::uint64_t seed) {
  CvGrid g;
  if (!a.lambda_g_values.empty()) {
    g.lambda_g_values = a.lambda_g_values;
    g.lambda_l_values = a.lambda_l_values;
    std::sort(g.lambda_g_values.begin(), g.lambda_g_values.end());
    std::sort(g.lambda_l_values.begin(), g.lambda_l_values.end());
  } else {
    g.lambda_g_values = grid_values(a.grid_max, a.grid_step);
    g.lambda_l_values = g.lambda_g_values;
  }
  g.global_at_most_local = !a.allow_global_above_local;
  g.folds = a.folds;
  g.seed = seed;
  g.validate();
  return g;
}

PerPatientAin ain_mode(const std::string& name) {
  return name == "assume" ? PerPatientAin::assume_continuous : PerPatientAin::brute_force;
}

void print_model(std::ostream& out, const GlopModel& m) {
  out << "lambda_g=" << m.penalty.lambda_g << " lambda_L=" << m.penalty.lambda_l
      << " loss=" << to_string(m.penalty.loss_scaling) << "\n";
  out << "objective=" << std::setprecision(10) << m.objective << " sweeps=" << m.sweeps
      << " converged=" << (m.converged ? "yes" : "no") << "\n";
  out << std::left << std::setw(20) << "feature" << std::right << std::setw(14) << "g"
      << std::setw(12) << "nonzero L" << "\n";
  for (Index j = 0; j < m.num_features(); ++j) {
    Index nz = 0;
    for (Index k = 0; k < m.num_patients(); ++k) nz += m.local(j, k) != 0.0 ? 1 : 0;
    const std::string name =
        j < static_cast<Index>(m.feature_names.size()) ? m.feature_names[static_cast<std::size_t>(j)]
                                                       : "x" + std::to_string(j);
    out << std::left << std::setw(20) << name << std::right << std::setw(14)
        << std::setprecision(6) << m.global(j) << std::setw(12) << nz << "\n";
  }
  for (const auto& w : m.warnings) out << "warning: " << w << "\n";
}

void print_certificate(std::ostream& out, const UniquenessCertificate& c) {
  out << "verdict: " << to_string(c.verdict) << "\n";
  for (const auto& d : c.details) out << "  " << d << "\n";
}

bool is_unique(UniquenessVerdict v) {
  return v == UniquenessVerdict::unique_by_theorem1 ||
         v == UniquenessVerdict::unique_by_active_rank;
}

nlohmann::json truth_json(const std::string& scenario, const TruePopulation& pop,
                          const std::vector<bool>* outliers) {
  nlohmann::json j;
  j["scenario"] = scenario;
  j["seed"] = pop.seed;
  j["noise_sd"] = pop.noise_sd;
  j["patient_ids"] = pop.patient_ids;
  j["feature_names"] = pop.feature_names;
  nlohmann::json coefs = nlohmann::json::array();
  for (const auto& c : pop.coefficients) coefs.push_back(std::vector<double>(c.data(), c.data() + c.size()));
  j["coefficients"] = coefs;
  j["patient_type"] = pop.patient_type;
  if (outliers) j["is_outlier"] = *outliers;
  return j;
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> m;
  for (const auto& n : names) m.push_back(method_from_string(n));
  return m;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-patient sparse regression with global and local coefficients", "glop"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "glop 0.1.0");

  int threads = 1;
  std::uint64_t seed = 1;

  // fit
  DataArgs fit_data;
  SolverArgs fit_solver;
  double fit_lg = 0.0, fit_ll = 0.0;
  std::string fit_out, fit_solver_name = "bcm", fit_cert_out, fit_ain = "brute";
  bool fit_require_unique = false;
  auto* fit = app.add_subcommand("fit", "Fit one (lambda_g, lambda_L) and write a model file");
  add_data_options(fit, fit_data);
  add_solver_options(fit, fit_solver);
  fit->add_option("--lambda-g", fit_lg, "Penalty on g")->required()->check(CLI::NonNegativeNumber);
  fit->add_option("--lambda-l", fit_ll, "Penalty on L")->required()->check(CLI::NonNegativeNumber);
  fit->add_option("--solver", fit_solver_name, "bcm or lasso (stacked single lasso)")
      ->check(CLI::IsMember({"bcm", "lasso"}))
      ->capture_default_str();
  fit->add_option("-o,--output", fit_out, "Model JSON")->required();
  fit->add_flag("--require-unique", fit_require_unique,
                "Fail with exit 3 unless the penalty and data guarantee a unique solution");
  fit->add_option("--certificate", fit_cert_out, "Also write the uniqueness certificate JSON");
  fit->add_option("--per-patient-ain", fit_ain, "brute or assume")
      ->check(CLI::IsMember({"brute", "assume"}))
      ->capture_default_str();

  // path
  DataArgs path_data;
  double ref_g = 1.0, ref_l = 2.0, min_ratio = 1e-8;
  int max_knots = 10000;
  std::string path_out;
  auto* path = app.add_subcommand("path", "Regularization path at a fixed lambda_g : lambda_L ratio");
  add_data_options(path, path_data);
  path->add_option("--ref-lambda-g", ref_g, "lambda_g at path parameter 1")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  path->add_option("--ref-lambda-l", ref_l, "lambda_L at path parameter 1")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  path->add_option("--min-ratio", min_ratio, "Stop at this fraction of the largest knot")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  path->add_option("--max-knots", max_knots, "Knot limit")->check(CLI::PositiveNumber);
  path->add_option("-o,--output", path_out, "Path CSV")->required();

  // cv and bic
  DataArgs sel_data[2];
  GridArgs sel_grid[2];
  SolverArgs sel_solver[2];
  std::string sel_out[2], sel_model_out[2], sel_scores_out[2];
  CLI::App* sel_cmd[2];
  const char* sel_names[2] = {"cv", "bic"};
  const char* sel_help[2] = {"Stratified k-fold grid search", "Grid search by BIC"};
  for (int i = 0; i < 2; ++i) {
    auto* c = app.add_subcommand(sel_names[i], sel_help[i]);
    sel_cmd[i] = c;
    add_data_options(c, sel_data[i]);
    add_grid_options(c, sel_grid[i], i == 0);
    add_solver_options(c, sel_solver[i]);
    c->add_option("-o,--output", sel_out[i], "Selection JSON")->required();
    c->add_option("--model-out", sel_model_out[i], "Model refit at the chosen cell");
    c->add_option("--scores-out", sel_scores_out[i], "Score table CSV");
    c->add_option("--seed", seed, "Fold shuffling seed")->capture_default_str();
    c->add_option("--threads", threads, "Worker threads")
        ->envname("GLOP_THREADS")
        ->check(CLI::PositiveNumber);
  }

  // certify
  DataArgs cert_data;
  std::string cert_model, cert_out, cert_ain = "brute";
  bool cert_require_unique = false;
  auto* certify = app.add_subcommand("certify", "Uniqueness certificate for a fitted model");
  add_data_options(certify, cert_data, false);
  certify->add_option("-m,--model", cert_model, "Model JSON")->required();
  certify->add_option("-o,--output", cert_out, "Certificate JSON");
  certify->add_option("--per-patient-ain", cert_ain, "brute or assume")
      ->check(CLI::IsMember({"brute", "assume"}))
      ->capture_default_str();
  certify->add_flag("--require-unique", cert_require_unique, "Exit 3 unless certified unique");

  // outliers
  std::string out_model, out_out;
  double percentile = 90.0;
  auto* outliers = app.add_subcommand("outliers", "Flag patients with unusually large local mass");
  outliers->add_option("-m,--model", out_model, "Model JSON")->required();
  outliers->add_option("--percentile", percentile, "Nearest-rank percentile of local mass")
      ->check(CLI::Range(0.0, 100.0))
      ->capture_default_str();
  outliers->add_option("-o,--output", out_out, "Report JSON");

  // simulate
  std::string sim_scenario = "tau", sim_out, sim_truth, sim_test_out;
  Index sim_p = 16, sim_kappa = 16, sim_n = 64, sim_test_rows = 0;
  double sim_c = 10.0, sim_z = 0.2;
  std::uint64_t sim_seed = 1;
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic dataset as CSV");
  simulate->add_option("--scenario", sim_scenario, "small, tau or outlier")
      ->check(CLI::IsMember({"small", "tau", "outlier"}))
      ->capture_default_str();
  simulate->add_option("--p", sim_p, "Features")->check(CLI::PositiveNumber);
  simulate->add_option("--kappa", sim_kappa, "Patients")->check(CLI::PositiveNumber);
  simulate->add_option("--n", sim_n, "Rows per patient")->check(CLI::PositiveNumber);
  simulate->add_option("--c", sim_c, "Outlier effect size");
  simulate->add_option("--z-probability", sim_z, "Outlier probability")->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
  simulate->add_option("-o,--output", sim_out, "Training CSV")->required();
  simulate->add_option("--truth", sim_truth, "True coefficients JSON");
  auto* test_rows = simulate->add_option("--test-rows", sim_test_rows, "Holdout rows per patient")
                        ->check(CLI::PositiveNumber);
  auto* test_out = simulate->add_option("--test-output", sim_test_out, "Holdout CSV");
  test_rows->needs(test_out);
  test_out->needs(test_rows);

  // bench
  std::string bench_experiment = "table1", bench_out, bench_report, bench_loss = "unnormalized",
              bench_selection = "bic";
  BenchmarkConfig bench_cfg;
  OutlierExperimentConfig outlier_cfg;
  std::vector<std::string> bench_methods{"glop", "dirty", "lasso"};
  GridArgs bench_grid;
  Index bench_p = 16, bench_kappa = 16, bench_n = 64, bench_n_test = 1000;
  int bench_trials = 20;
  auto* bench = app.add_subcommand("bench", "Synthetic benchmark (table1 or outliers)");
  bench->add_option("--experiment", bench_experiment, "table1 or outliers")
      ->check(CLI::IsMember({"table1", "outliers"}))
      ->capture_default_str();
  bench->add_option("--p", bench_p, "Features")->check(CLI::PositiveNumber);
  bench->add_option("--kappa", bench_kappa, "Patients")->check(CLI::PositiveNumber);
  bench->add_option("--n", bench_n, "Training rows per patient")->check(CLI::PositiveNumber);
  bench->add_option("--n-test", bench_n_test, "Holdout rows per patient")->check(CLI::PositiveNumber);
  bench->add_option("--trials", bench_trials, "Trials (table1) or seeds (outliers)")
      ->check(CLI::PositiveNumber);
  bench->add_option("--methods", bench_methods, "Subset of glop,dirty,lasso")->delimiter(',');
  bench->add_option("--loss", bench_loss, "Loss scaling: unnormalized or half-n")
      ->check(CLI::IsMember({"unnormalized", "half-n"}))
      ->capture_default_str();
  bench->add_option("--selection", bench_selection, "Outlier experiment penalty choice: bic, cv, fixed")
      ->check(CLI::IsMember({"bic", "cv", "fixed"}))
      ->capture_default_str();
  bench->add_option("--percentile", outlier_cfg.percentile, "Outlier experiment percentile")
      ->check(CLI::Range(0.0, 100.0))
      ->capture_default_str();
  bench->add_option("--c", outlier_cfg.c, "Outlier effect size")->capture_default_str();
  bench->add_option("--z-probability", outlier_cfg.z_probability, "Outlier probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_grid_options(bench, bench_grid, true);
  bench->add_option("--seed", seed, "Base seed")->capture_default_str();
  bench->add_option("--threads", threads, "Worker threads")
      ->envname("GLOP_THREADS")
      ->check(CLI::PositiveNumber);
  bench->add_option("-o,--output", bench_out, "Table CSV (table1)");
  bench->add_option("--report", bench_report, "Full report JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (fit->parsed()) {
      const auto data = load_data(fit_data);
      const GlopPenalty pen = make_penalty(data, fit_data, fit_lg, fit_ll);
      std::optional<UniquenessCertificate> cert;
      if (fit_require_unique || !fit_cert_out.empty()) {
        Theorem1Options to;
        to.per_patient_ain = ain_mode(fit_ain);
        cert = theorem1_certificate(data, pen, to);
        if (!fit_cert_out.empty()) write_text_file(fit_cert_out, certificate_to_json(*cert));
        if (fit_require_unique && cert->verdict != UniquenessVerdict::unique_by_theorem1) {
          print_certificate(out, *cert);
          throw UniquenessFailure("uniqueness not guaranteed for this penalty and data");
        }
      }
      GlopModel model;
      if (fit_solver_name == "lasso") {
        model = solve_glop_single_lasso(data, pen);
      } else {
        model = solve_glop_bcm(data, pen, bcm_options(fit_solver));
      }
      save_model(fit_out, model, cert);
      print_model(out, model);
      if (!model.converged) {
        err << "solver did not converge\n";
        return kSolverFailure;
      }
      return kOk;
    }

    if (path->parsed()) {
      const auto data = load_data(path_data);
      GlopPathOptions o;
      o.loss_scaling = loss_scaling_from_string(path_data.loss);
      o.global_feature_weights = feature_weights(data, path_data);
      if (path_data.unpenalized_intercept) {
        throw UsageError("path needs every coefficient penalized; drop --unpenalized-intercept");
      }
      o.lars.min_lambda_ratio = min_ratio;
      o.lars.max_knots = max_knots;
      const GlopPath gp = glop_path(data, ref_g, ref_l, o);
      write_text_file(path_out, path_to_csv(gp));
      const auto& rp = gp.path();
      out << "knots=" << rp.num_knots() << " lambda_max=" << rp.lambda_max
          << " last_lambda=" << rp.last_lambda() << " stop=" << rp.stop_reason
          << (rp.truncated ? " (truncated)" : "") << "\n";
      return kOk;
    }

    for (int i = 0; i < 2; ++i) {
      if (!sel_cmd[i]->parsed()) continue;
      const auto data = load_data(sel_data[i]);
      const CvGrid grid = make_grid(sel_grid[i], seed);
      SelectionOptions so;
      so.loss_scaling = loss_scaling_from_string(sel_data[i].loss);
      so.global_feature_weights = feature_weights(data, sel_data[i]);
      so.bcm = bcm_options(sel_solver[i]);
      so.threads = threads;
      const SelectionResult r =
          i == 0 ? cv_grid_search(data, grid, so) : bic_grid_select(data, grid, so);
      write_text_file(sel_out[i], selection_to_json(r));
      if (!sel_scores_out[i].empty()) write_text_file(sel_scores_out[i], score_table_to_csv(r));
      out << format_selection_summary(r);
      if (!sel_model_out[i].empty()) {
        const GlopPenalty pen =
            make_penalty(data, sel_data[i], r.chosen.lambda_g, r.chosen.lambda_l);
        const GlopModel model = solve_glop_bcm(data, pen, so.bcm);
        save_model(sel_model_out[i], model);
        print_model(out, model);
        if (!model.converged) {
          err << "refit at the chosen cell did not converge\n";
          return kSolverFailure;
        }
      }
      return kOk;
    }

    if (certify->parsed()) {
      const ModelFile mf = load_model(cert_model);
      const auto data = load_data(cert_data);
      Theorem1Options to;
      to.per_patient_ain = ain_mode(cert_ain);
      const UniquenessCertificate c = certify_model(data, mf.model, to);
      if (!cert_out.empty()) write_text_file(cert_out, certificate_to_json(c));
      print_certificate(out, c);
      if (cert_require_unique && !is_unique(c.verdict)) {
        throw UniquenessFailure("model is not certified unique");
      }
      return kOk;
    }

    if (outliers->parsed()) {
      const ModelFile mf = load_model(out_model);
      const OutlierReport r = detect_outliers(mf.model, percentile);
      if (!out_out.empty()) write_text_file(out_out, outlier_report_to_json(r));
      out << format_outlier_table(r);
      return kOk;
    }

    if (simulate->parsed()) {
      std::optional<SyntheticData> syn;
      std::vector<bool> flags;
      if (sim_scenario == "small") {
        syn = generate_small_example(sim_seed);
      } else if (sim_scenario == "tau") {
        syn = generate_tau_population(sim_p, sim_kappa, sim_n, sim_seed);
      } else {
        auto sc = generate_outlier_scenario(sim_kappa, sim_n, sim_p, sim_c, sim_z, sim_seed);
        flags = sc.is_outlier;
        syn = SyntheticData{std::move(sc.dataset), std::move(sc.population)};
      }
      write_csv(syn->dataset, sim_out);
      if (!sim_truth.empty()) {
        const auto j = truth_json(sim_scenario, syn->population,
                                  sim_scenario == "outlier" ? &flags : nullptr);
        write_text_file(sim_truth, j.dump(2) + "\n");
      }
      if (sim_test_rows > 0) {
        write_csv(holdout_testset(syn->population, sim_test_rows, trial_seed(sim_seed, -1)),
                  sim_test_out);
      }
      out << "scenario=" << sim_scenario << " patients=" << syn->dataset.num_patients()
          << " features=" << syn->dataset.num_features()
          << " rows=" << syn->dataset.total_rows() << "\n";
      return kOk;
    }

    if (bench->parsed()) {
      if (bench_experiment == "table1") {
        if (bench_out.empty()) throw UsageError("bench --experiment table1 needs --output");
        bench_cfg.p = bench_p;
        bench_cfg.kappa = bench_kappa;
        bench_cfg.n = bench_n;
        bench_cfg.n_test = bench_n_test;
        bench_cfg.trials = bench_trials;
        bench_cfg.seed = seed;
        bench_cfg.methods = parse_methods(bench_methods);
        bench_cfg.loss_scaling = loss_scaling_from_string(bench_loss);
        bench_cfg.grid = make_grid(bench_grid, seed);
        bench_cfg.threads = threads;
        const BenchmarkReport r = run_table1_benchmark(bench_cfg);
        write_text_file(bench_out, benchmark_to_csv(r));
        if (!bench_report.empty()) write_text_file(bench_report, benchmark_to_json(r));
        out << format_benchmark_table(r);
        return kOk;
      }
      outlier_cfg.kappa = bench->count("--kappa") ? bench_kappa : outlier_cfg.kappa;
      outlier_cfg.n = bench->count("--n") ? bench_n : outlier_cfg.n;
      outlier_cfg.p = bench->count("--p") ? bench_p : outlier_cfg.p;
      outlier_cfg.n_test = bench_n_test;
      outlier_cfg.seeds = bench->count("--trials") ? bench_trials : outlier_cfg.seeds;
      outlier_cfg.seed = seed;
      outlier_cfg.selection = penalty_selection_from_string(bench_selection);
      outlier_cfg.loss_scaling = loss_scaling_from_string(bench_loss);
      outlier_cfg.grid = make_grid(bench_grid, seed);
      outlier_cfg.threads = threads;
      const OutlierExperimentReport r = run_outlier_experiment(outlier_cfg);
      if (!bench_report.empty()) write_text_file(bench_report, outlier_experiment_to_json(r));
      out << "seeds=" << r.outcomes.size() << " exact_match_rate=" << r.exact_match_rate
          << " z_resolves_rate=" << r.z_resolves_rate << "\n";
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ArgumentError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const UniquenessFailure& e) {
    err << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  }
  return kUsage;
}

int run(const std::vector<std::string>& args) { return run(args, std::cout, std::cerr); }

}  // namespace glop::cli
