#include <glop/io.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace glop {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

namespace {

// JSON has no inf/nan; they travel as strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double to_num(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw SchemaError("expected a number, got " + j.dump());
}

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw SchemaError(std::string("expected an object holding '") + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string("missing field '") + key + "'");
  return *it;
}

json vec(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

Vector to_vec(const json& j) {
  if (!j.is_array()) throw SchemaError("expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = to_num(j[i]);
  return v;
}

json cell(const GridCell& c) { return {{"lambda_g", num(c.lambda_g)}, {"lambda_l", num(c.lambda_l)}}; }

GridCell to_cell(const json& j) { return {to_num(field(j, "lambda_g")), to_num(field(j, "lambda_l"))}; }

json cells(const std::vector<GridCell>& cs) {
  json a = json::array();
  for (const auto& c : cs) a.push_back(cell(c));
  return a;
}

std::vector<GridCell> to_cells(const json& j) {
  std::vector<GridCell> out;
  for (const auto& c : j) out.push_back(to_cell(c));
  return out;
}

template <class F>
auto parse_document(const std::string& text, const char* what, F&& build) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid ") + what + " JSON: " + e.what());
  }
  try {
    return build(doc);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed ") + what + " JSON: " + e.what());
  }
}

json certificate_json(const UniquenessCertificate& c) {
  json j;
  j["verdict"] = to_string(c.verdict);
  if (c.witness) {
    j["witness"] = {{"column", c.witness->column},
                    {"others", c.witness->others},
                    {"signs", c.witness->signs},
                    {"weights", c.witness->weights}};
  } else {
    j["witness"] = nullptr;
  }
  j["details"] = c.details;
  j["penalty_condition_met"] = c.penalty_condition_met;
  j["even_kappa_refinement_used"] = c.even_kappa_refinement_used;
  j["per_patient_ain"] = c.per_patient_ain_checked ? "brute_force" : "assume_continuous";
  j["failing_patient"] = c.failing_patient ? json(*c.failing_patient) : json(nullptr);
  return j;
}

UniquenessCertificate certificate_value(const json& j) {
  UniquenessCertificate c;
  try {
    c.verdict = uniqueness_verdict_from_string(field(j, "verdict").get<std::string>());
  } catch (const ArgumentError& e) {
    throw SchemaError(e.what());
  }
  const json& w = field(j, "witness");
  if (!w.is_null()) {
    AinWitness witness;
    witness.column = field(w, "column").get<Index>();
    witness.others = field(w, "others").get<std::vector<Index>>();
    witness.signs = field(w, "signs").get<std::vector<int>>();
    witness.weights = field(w, "weights").get<std::vector<double>>();
    c.witness = std::move(witness);
  }
  c.details = field(j, "details").get<std::vector<std::string>>();
  c.penalty_condition_met = field(j, "penalty_condition_met").get<bool>();
  c.even_kappa_refinement_used = field(j, "even_kappa_refinement_used").get<bool>();
  c.per_patient_ain_checked = field(j, "per_patient_ain").get<std::string>() == "brute_force";
  const json& fp = field(j, "failing_patient");
  if (!fp.is_null()) c.failing_patient = fp.get<Index>();
  return c;
}

LossScaling scaling_value(const json& j) {
  try {
    return loss_scaling_from_string(j.get<std::string>());
  } catch (const ArgumentError& e) {
    throw SchemaError(e.what());
  }
}

}  // namespace

std::string model_to_json(const GlopModel& model,
                          const std::optional<UniquenessCertificate>& certificate) {
  json j;
  j["format"] = "glop-model";
  j["version"] = 1;
  j["feature_names"] = model.feature_names;
  j["patient_ids"] = model.patient_ids;
  j["g"] = vec(model.global);
  json l = json::array();
  for (Index k = 0; k < model.local.cols(); ++k) l.push_back(vec(model.local.col(k)));
  j["L"] = l;
  j["lambda_g"] = num(model.penalty.lambda_g);
  j["lambda_l"] = num(model.penalty.lambda_l);
  j["loss_scaling"] = to_string(model.penalty.loss_scaling);
  j["global_feature_weights"] = model.penalty.global_feature_weights;
  j["objective"] = num(model.objective);
  j["converged"] = model.converged;
  j["sweeps"] = model.sweeps;
  j["warnings"] = model.warnings;
  if (certificate) j["certificate"] = certificate_json(*certificate);
  return j.dump(2) + "\n";
}

ModelFile model_from_json(const std::string& text) {
  return parse_document(text, "model", [](const json& j) {
    if (j.contains("format") && j["format"] != "glop-model") {
      throw SchemaError("not a gLOP model file");
    }
    ModelFile out;
    GlopModel& m = out.model;
    m.feature_names = field(j, "feature_names").get<std::vector<std::string>>();
    m.patient_ids = field(j, "patient_ids").get<std::vector<std::string>>();
    m.global = to_vec(field(j, "g"));
    const json& l = field(j, "L");
    if (!l.is_array()) throw SchemaError("'L' must be an array of columns");
    const Index p = m.global.size();
    m.local = Matrix::Zero(p, static_cast<Index>(l.size()));
    for (std::size_t k = 0; k < l.size(); ++k) {
      const Vector col = to_vec(l[k]);
      if (col.size() != p) throw SchemaError("every 'L' column must have length p");
      m.local.col(static_cast<Index>(k)) = col;
    }
    if (static_cast<Index>(m.feature_names.size()) != p) {
      throw SchemaError("'feature_names' length must equal the length of 'g'");
    }
    if (!m.patient_ids.empty() && m.patient_ids.size() != l.size()) {
      throw SchemaError("'patient_ids' length must equal the number of 'L' columns");
    }
    m.penalty.lambda_g = to_num(field(j, "lambda_g"));
    m.penalty.lambda_l = to_num(field(j, "lambda_l"));
    m.penalty.loss_scaling = scaling_value(field(j, "loss_scaling"));
    if (j.contains("global_feature_weights")) {
      m.penalty.global_feature_weights = j["global_feature_weights"].get<std::vector<double>>();
    }
    m.objective = to_num(field(j, "objective"));
    m.converged = field(j, "converged").get<bool>();
    if (j.contains("sweeps")) m.sweeps = j["sweeps"].get<int>();
    if (j.contains("warnings")) m.warnings = j["warnings"].get<std::vector<std::string>>();
    if (j.contains("certificate") && !j["certificate"].is_null()) {
      out.certificate = certificate_value(j["certificate"]);
    }
    return out;
  });
}

void save_model(const std::filesystem::path& path, const GlopModel& model,
                const std::optional<UniquenessCertificate>& certificate) {
  write_text_file(path, model_to_json(model, certificate));
}

ModelFile load_model(const std::filesystem::path& path) {
  return model_from_json(read_text_file(path));
}

std::string certificate_to_json(const UniquenessCertificate& certificate) {
  return certificate_json(certificate).dump(2) + "\n";
}

UniquenessCertificate certificate_from_json(const std::string& text) {
  return parse_document(text, "certificate", [](const json& j) { return certificate_value(j); });
}

std::string selection_to_json(const SelectionResult& r) {
  json j;
  j["criterion"] = r.criterion;
  j["loss_scaling"] = to_string(r.loss_scaling);
  j["chosen"] = cell(r.chosen);
  j["best_score"] = num(r.best_score);
  json table = json::array();
  for (const auto& row : r.score_table) {
    table.push_back({{"lambda_g", num(row.lambda_g)},
                     {"lambda_l", num(row.lambda_l)},
                     {"score", num(row.score)},
                     {"n_failed_folds", row.n_failed_folds}});
  }
  j["score_table"] = table;
  j["tie_rule"] = "larger lambda_l, then larger lambda_g";
  j["tied_cells"] = cells(r.tied_cells);
  j["ties_broken"] = r.ties_broken;
  j["failed_cells"] = cells(r.failed_cells);
  j["warnings"] = r.warnings;
  if (r.criterion == "bic") {
    j["bic_definition"] = "N ln(RSS/N) + df ln(N); df = nonzero entries of g and L";
  } else if (r.criterion == "cv") {
    j["cv_score"] = "mean over folds of validation MSE with in-population prediction";
  }
  return j.dump(2) + "\n";
}

SelectionResult selection_from_json(const std::string& text) {
  return parse_document(text, "selection", [](const json& j) {
    SelectionResult r;
    r.criterion = field(j, "criterion").get<std::string>();
    r.loss_scaling = scaling_value(field(j, "loss_scaling"));
    r.chosen = to_cell(field(j, "chosen"));
    r.best_score = to_num(field(j, "best_score"));
    for (const auto& row : field(j, "score_table")) {
      r.score_table.push_back({to_num(field(row, "lambda_g")), to_num(field(row, "lambda_l")),
                               to_num(field(row, "score")),
                               field(row, "n_failed_folds").get<int>()});
    }
    r.tied_cells = to_cells(field(j, "tied_cells"));
    r.ties_broken = field(j, "ties_broken").get<std::vector<std::string>>();
    r.failed_cells = to_cells(field(j, "failed_cells"));
    r.warnings = field(j, "warnings").get<std::vector<std::string>>();
    return r;
  });
}

std::string outlier_report_to_json(const OutlierReport& r) {
  json j;
  j["patient_ids"] = r.patient_ids;
  json mass = json::array();
  for (double v : r.local_mass) mass.push_back(num(v));
  j["local_mass"] = mass;
  j["percentile"] = num(r.percentile);
  j["threshold"] = num(r.threshold);
  j["flagged"] = r.flagged;
  j["flagged_indices"] = r.flagged_indices;
  json nz = json::array();
  for (const auto& patient : r.nonzero_local) {
    json entries = json::array();
    for (const auto& [name, value] : patient) entries.push_back({{"feature", name}, {"value", num(value)}});
    nz.push_back(entries);
  }
  j["nonzero_local"] = nz;
  j["rule"] = r.rule;
  j["notes"] = r.notes;
  return j.dump(2) + "\n";
}

OutlierReport outlier_report_from_json(const std::string& text) {
  return parse_document(text, "outlier report", [](const json& j) {
    OutlierReport r;
    r.patient_ids = field(j, "patient_ids").get<std::vector<std::string>>();
    for (const auto& v : field(j, "local_mass")) r.local_mass.push_back(to_num(v));
    r.percentile = to_num(field(j, "percentile"));
    r.threshold = to_num(field(j, "threshold"));
    r.flagged = field(j, "flagged").get<std::vector<std::string>>();
    r.flagged_indices = field(j, "flagged_indices").get<std::vector<Index>>();
    for (const auto& patient : field(j, "nonzero_local")) {
      std::vector<std::pair<std::string, double>> entries;
      for (const auto& e : patient) {
        entries.emplace_back(field(e, "feature").get<std::string>(), to_num(field(e, "value")));
      }
      r.nonzero_local.push_back(std::move(entries));
    }
    r.rule = field(j, "rule").get<std::string>();
    r.notes = field(j, "notes").get<std::vector<std::string>>();
    return r;
  });
}

namespace {

json grid_json(const CvGrid& g) {
  return {{"lambda_g_values", g.lambda_g_values},
          {"lambda_l_values", g.lambda_l_values},
          {"global_at_most_local", g.global_at_most_local},
          {"folds", g.folds},
          {"seed", g.seed}};
}

CvGrid grid_value(const json& j) {
  CvGrid g;
  g.lambda_g_values = field(j, "lambda_g_values").get<std::vector<double>>();
  g.lambda_l_values = field(j, "lambda_l_values").get<std::vector<double>>();
  g.global_at_most_local = field(j, "global_at_most_local").get<bool>();
  g.folds = field(j, "folds").get<int>();
  g.seed = field(j, "seed").get<std::uint64_t>();
  return g;
}

Method method_value(const json& j) {
  try {
    return method_from_string(j.get<std::string>());
  } catch (const ArgumentError& e) {
    throw SchemaError(e.what());
  }
}

}  // namespace

std::string benchmark_to_json(const BenchmarkReport& r) {
  const BenchmarkConfig& c = r.config;
  json j;
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(to_string(m));
  j["config"] = {{"p", c.p},
                 {"kappa", c.kappa},
                 {"n", c.n},
                 {"trials", c.trials},
                 {"seed", c.seed},
                 {"n_test", c.n_test},
                 {"loss_scaling", to_string(c.loss_scaling)},
                 {"methods", methods},
                 {"grid", grid_json(c.grid)}};
  json trials = json::array();
  for (const auto& t : r.trials) {
    json mse = json::object();
    json chosen = json::object();
    for (std::size_t i = 0; i < c.methods.size(); ++i) {
      mse[to_string(c.methods[i])] = num(t.mse[i]);
      chosen[to_string(c.methods[i])] = cell(t.chosen[i]);
    }
    json entry = {{"trial", t.trial}, {"seed", t.seed}, {"mse", mse}, {"chosen", chosen}};
    entry["dirty_both_nonzero"] = t.dirty_both_nonzero ? json(*t.dirty_both_nonzero) : json(nullptr);
    trials.push_back(entry);
  }
  j["trials"] = trials;
  json summaries = json::array();
  for (const auto& s : r.summaries) {
    json per = json::array();
    for (double v : s.per_trial) per.push_back(num(v));
    summaries.push_back({{"method", to_string(s.method)},
                         {"mean_mse", num(s.mean_mse)},
                         {"sd_mse", num(s.sd_mse)},
                         {"per_trial", per}});
  }
  j["summaries"] = summaries;
  json tests = json::array();
  for (const auto& t : r.tests) {
    tests.push_back({{"first", to_string(t.first)},
                     {"second", to_string(t.second)},
                     {"test", "independent two-sample t (pooled variance), two-sided"},
                     {"statistic", num(t.test.statistic)},
                     {"degrees_of_freedom", num(t.test.degrees_of_freedom)},
                     {"p_value", num(t.test.p_value)}});
  }
  j["tests"] = tests;
  j["notes"] = r.notes;
  return j.dump(2) + "\n";
}

BenchmarkReport benchmark_from_json(const std::string& text) {
  return parse_document(text, "benchmark", [](const json& j) {
    BenchmarkReport r;
    const json& c = field(j, "config");
    r.config.p = field(c, "p").get<Index>();
    r.config.kappa = field(c, "kappa").get<Index>();
    r.config.n = field(c, "n").get<Index>();
    r.config.trials = field(c, "trials").get<int>();
    r.config.seed = field(c, "seed").get<std::uint64_t>();
    r.config.n_test = field(c, "n_test").get<Index>();
    r.config.loss_scaling = scaling_value(field(c, "loss_scaling"));
    r.config.methods.clear();
    for (const auto& m : field(c, "methods")) r.config.methods.push_back(method_value(m));
    r.config.grid = grid_value(field(c, "grid"));
    for (const auto& t : field(j, "trials")) {
      TrialOutcome o;
      o.trial = field(t, "trial").get<int>();
      o.seed = field(t, "seed").get<std::uint64_t>();
      for (Method m : r.config.methods) {
        o.mse.push_back(to_num(field(field(t, "mse"), to_string(m).c_str())));
        o.chosen.push_back(to_cell(field(field(t, "chosen"), to_string(m).c_str())));
      }
      const json& both = field(t, "dirty_both_nonzero");
      if (!both.is_null()) o.dirty_both_nonzero = both.get<bool>();
      r.trials.push_back(std::move(o));
    }
    for (const auto& s : field(j, "summaries")) {
      MethodSummary m;
      m.method = method_value(field(s, "method"));
      m.mean_mse = to_num(field(s, "mean_mse"));
      m.sd_mse = to_num(field(s, "sd_mse"));
      for (const auto& v : field(s, "per_trial")) m.per_trial.push_back(to_num(v));
      r.summaries.push_back(std::move(m));
    }
    for (const auto& t : field(j, "tests")) {
      PairwiseTest p;
      p.first = method_value(field(t, "first"));
      p.second = method_value(field(t, "second"));
      p.test.statistic = to_num(field(t, "statistic"));
      p.test.degrees_of_freedom = to_num(field(t, "degrees_of_freedom"));
      p.test.p_value = to_num(field(t, "p_value"));
      r.tests.push_back(p);
    }
    r.notes = field(j, "notes").get<std::vector<std::string>>();
    return r;
  });
}

std::string outlier_experiment_to_json(const OutlierExperimentReport& r) {
  const OutlierExperimentConfig& c = r.config;
  json j;
  j["config"] = {{"kappa", c.kappa},
                 {"n", c.n},
                 {"p", c.p},
                 {"c", num(c.c)},
                 {"z_probability", num(c.z_probability)},
                 {"seeds", c.seeds},
                 {"seed", c.seed},
                 {"percentile", num(c.percentile)},
                 {"selection", to_string(c.selection)},
                 {"fixed_penalty", cell(c.fixed_penalty)},
                 {"grid", grid_json(c.grid)},
                 {"loss_scaling", to_string(c.loss_scaling)},
                 {"n_test", c.n_test}};
  json outcomes = json::array();
  for (const auto& o : r.outcomes) {
    outcomes.push_back({{"seed", o.seed},
                        {"true_outliers", o.true_outliers},
                        {"flagged", o.flagged},
                        {"exact_match", o.exact_match},
                        {"chosen", cell(o.chosen)},
                        {"flagged_with_z", o.flagged_with_z},
                        {"chosen_with_z", cell(o.chosen_with_z)},
                        {"global_mse", num(o.global_mse)},
                        {"global_mse_with_z", num(o.global_mse_with_z)},
                        {"z_resolves", o.z_resolves}});
  }
  j["outcomes"] = outcomes;
  j["exact_match_rate"] = num(r.exact_match_rate);
  j["z_resolves_rate"] = num(r.z_resolves_rate);
  return j.dump(2) + "\n";
}

OutlierExperimentReport outlier_experiment_from_json(const std::string& text) {
  return parse_document(text, "outlier experiment", [](const json& j) {
    OutlierExperimentReport r;
    const json& c = field(j, "config");
    r.config.kappa = field(c, "kappa").get<Index>();
    r.config.n = field(c, "n").get<Index>();
    r.config.p = field(c, "p").get<Index>();
    r.config.c = to_num(field(c, "c"));
    r.config.z_probability = to_num(field(c, "z_probability"));
    r.config.seeds = field(c, "seeds").get<int>();
    r.config.seed = field(c, "seed").get<std::uint64_t>();
    r.config.percentile = to_num(field(c, "percentile"));
    try {
      r.config.selection = penalty_selection_from_string(field(c, "selection").get<std::string>());
    } catch (const ArgumentError& e) {
      throw SchemaError(e.what());
    }
    r.config.fixed_penalty = to_cell(field(c, "fixed_penalty"));
    r.config.grid = grid_value(field(c, "grid"));
    r.config.loss_scaling = scaling_value(field(c, "loss_scaling"));
    r.config.n_test = field(c, "n_test").get<Index>();
    for (const auto& o : field(j, "outcomes")) {
      OutlierSeedOutcome s;
      s.seed = field(o, "seed").get<std::uint64_t>();
      s.true_outliers = field(o, "true_outliers").get<std::vector<std::string>>();
      s.flagged = field(o, "flagged").get<std::vector<std::string>>();
      s.exact_match = field(o, "exact_match").get<bool>();
      s.chosen = to_cell(field(o, "chosen"));
      s.flagged_with_z = field(o, "flagged_with_z").get<std::vector<std::string>>();
      s.chosen_with_z = to_cell(field(o, "chosen_with_z"));
      s.global_mse = to_num(field(o, "global_mse"));
      s.global_mse_with_z = to_num(field(o, "global_mse_with_z"));
      s.z_resolves = field(o, "z_resolves").get<bool>();
      r.outcomes.push_back(std::move(s));
    }
    r.exact_match_rate = to_num(field(j, "exact_match_rate"));
    r.z_resolves_rate = to_num(field(j, "z_resolves_rate"));
    return r;
  });
}

namespace {

std::string csv_num(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

}  // namespace

std::string path_to_csv(const GlopPath& path) {
  const StackedDesign& d = path.design();
  const RegularizationPath& rp = path.path();
  std::ostringstream out;
  out << "knot_index,lambda,column_index,role,patient_id,feature,coefficient\n";
  for (std::size_t knot = 0; knot < rp.knots.size(); ++knot) {
    const Vector& xi = rp.coefficients[knot];
    for (Index i = 0; i < xi.size(); ++i) {
      const ColumnRole& role = d.column_map[static_cast<std::size_t>(i)];
      const bool global = role.kind == ColumnRole::Kind::global;
      out << knot << ',' << csv_num(rp.knots[knot]) << ',' << i << ','
          << (global ? "global" : "local") << ','
          << (global ? "" : d.patient_ids[static_cast<std::size_t>(role.patient)]) << ','
          << d.feature_names[static_cast<std::size_t>(role.feature)] << ','
          << csv_num(xi(i) / d.column_lambda(i)) << '\n';
    }
  }
  return out.str();
}

std::string score_table_to_csv(const SelectionResult& result) {
  std::ostringstream out;
  out << "lambda_g,lambda_l,score,n_failed_folds\n";
  for (const auto& row : result.score_table) {
    out << csv_num(row.lambda_g) << ',' << csv_num(row.lambda_l) << ',' << csv_num(row.score)
        << ',' << row.n_failed_folds << '\n';
  }
  return out.str();
}

std::string benchmark_to_csv(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "p,kappa,n,method,mean_mse,sd_mse\n";
  for (const auto& s : report.summaries) {
    out << report.config.p << ',' << report.config.kappa << ',' << report.config.n << ','
        << to_string(s.method) << ',' << csv_num(s.mean_mse) << ',' << csv_num(s.sd_mse) << '\n';
  }
  return out.str();
}

std::string format_outlier_table(const OutlierReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(16) << "patient" << std::right << std::setw(14) << "local_mass"
      << "  flag  nonzero local coefficients\n";
  for (std::size_t k = 0; k < report.patient_ids.size(); ++k) {
    const bool flagged = std::find(report.flagged_indices.begin(), report.flagged_indices.end(),
                                   static_cast<Index>(k)) != report.flagged_indices.end();
    out << std::left << std::setw(16) << report.patient_ids[k] << std::right << std::setw(14)
        << std::setprecision(6) << report.local_mass[k] << "  " << (flagged ? " *  " : "    ")
        << ' ';
    bool first = true;
    for (const auto& [name, value] : report.nonzero_local[k]) {
      out << (first ? "" : ", ") << name << '=' << std::setprecision(4) << value;
      first = false;
    }
    out << '\n';
  }
  out << "threshold (" << report.percentile << "th percentile, nearest rank): "
      << std::setprecision(6) << report.threshold << "; flagged " << report.flagged.size()
      << " of " << report.patient_ids.size() << '\n';
  for (const auto& n : report.notes) out << "note: " << n << '\n';
  return out.str();
}

std::string format_benchmark_table(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "p=" << report.config.p << " kappa=" << report.config.kappa << " n=" << report.config.n
      << " trials=" << report.config.trials << " loss=" << to_string(report.config.loss_scaling)
      << '\n';
  out << std::left << std::setw(8) << "method" << std::right << std::setw(14) << "mean_mse"
      << std::setw(12) << "sd_mse" << '\n';
  for (const auto& s : report.summaries) {
    out << std::left << std::setw(8) << to_string(s.method) << std::right << std::fixed
        << std::setprecision(4) << std::setw(14) << s.mean_mse << std::setw(12) << s.sd_mse
        << '\n';
    out.unsetf(std::ios::fixed);
  }
  for (const auto& t : report.tests) {
    out << to_string(t.first) << " vs " << to_string(t.second) << ": t=" << std::setprecision(4)
        << t.test.statistic << " df=" << t.test.degrees_of_freedom
        << " p=" << t.test.p_value << '\n';
  }
  for (const auto& n : report.notes) out << "note: " << n << '\n';
  return out.str();
}

std::string format_selection_summary(const SelectionResult& result) {
  std::ostringstream out;
  out << result.criterion << " selected lambda_g=" << result.chosen.lambda_g
      << " lambda_l=" << result.chosen.lambda_l << " (score " << std::setprecision(8)
      << result.best_score << ", " << result.score_table.size() << " cells scored)\n";
  for (const auto& step : result.ties_broken) out << "  tie: " << step << '\n';
  for (const auto& w : result.warnings) out << "  warning: " << w << '\n';
  return out.str();
}

}  // namespace glop
