#include <glop/dataset.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

namespace glop {

// ---------------------------------------------------------------------------
// MultiTaskDataset

MultiTaskDataset::MultiTaskDataset(std::vector<PatientBlock> blocks,
                                   std::vector<std::string> feature_names,
                                   std::optional<Index> intercept_column)
    : blocks_(std::move(blocks)),
      feature_names_(std::move(feature_names)),
      intercept_column_(intercept_column) {
  if (blocks_.empty()) throw ArgumentError("dataset needs at least one patient");
  const Index p = num_features();
  std::set<std::string> ids;
  for (const auto& b : blocks_) {
    if (b.design.rows() < 1) {
      throw ArgumentError("patient '" + b.patient_id + "' has no rows");
    }
    if (b.design.cols() != p) {
      throw ArgumentError("patient '" + b.patient_id + "' has " +
                          std::to_string(b.design.cols()) + " columns, expected " +
                          std::to_string(p));
    }
    if (b.targets.size() != b.design.rows()) {
      throw ArgumentError("patient '" + b.patient_id + "' target length mismatch");
    }
    if (!b.design.allFinite() || !b.targets.allFinite()) {
      throw ArgumentError("patient '" + b.patient_id + "' has non-finite entries");
    }
    if (!ids.insert(b.patient_id).second) {
      throw ArgumentError("duplicate patient id '" + b.patient_id + "'");
    }
  }
  if (intercept_column_) {
    const Index c = *intercept_column_;
    if (c < 0 || c >= p) throw ArgumentError("intercept column out of range");
    for (const auto& b : blocks_) {
      if ((b.design.col(c).array() != 1.0).any()) {
        throw ArgumentError("intercept column is not constant 1 for patient '" + b.patient_id +
                            "'");
      }
    }
  }
}

Index MultiTaskDataset::total_rows() const {
  Index n = 0;
  for (const auto& b : blocks_) n += b.rows();
  return n;
}

bool MultiTaskDataset::equal_sizes() const {
  return std::all_of(blocks_.begin(), blocks_.end(),
                     [&](const PatientBlock& b) { return b.rows() == blocks_.front().rows(); });
}

std::vector<std::string> MultiTaskDataset::patient_ids() const {
  std::vector<std::string> ids;
  ids.reserve(blocks_.size());
  for (const auto& b : blocks_) ids.push_back(b.patient_id);
  return ids;
}

Matrix MultiTaskDataset::pooled_design() const {
  Matrix x(total_rows(), num_features());
  Index row = 0;
  for (const auto& b : blocks_) {
    x.middleRows(row, b.rows()) = b.design;
    row += b.rows();
  }
  return x;
}

Vector MultiTaskDataset::pooled_targets() const {
  Vector y(total_rows());
  Index row = 0;
  for (const auto& b : blocks_) {
    y.segment(row, b.rows()) = b.targets;
    row += b.rows();
  }
  return y;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string trim(std::string_view s) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ParseError("cannot parse '" + cell + "' as a finite number at row " +
                         std::to_string(row) + ", column " + std::to_string(col),
                     row, col);
  }
  return value;
}

}  // namespace

MultiTaskDataset parse_csv(const std::string& text, const CsvOptions& options) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_row(line);
      break;
    }
  }
  if (header.empty()) throw EmptyInputError("CSV input is empty");

  auto find_column = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw SchemaError("missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t patient_col = find_column(options.patient_column);
  const std::size_t target_col = find_column(options.target_column);

  std::vector<std::size_t> feature_cols;
  std::vector<std::string> feature_names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == patient_col || c == target_col) continue;
    feature_cols.push_back(c);
    feature_names.push_back(header[c]);
  }

  struct Rows {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Rows> by_patient;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw ParseError("row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                           " cells, header has " + std::to_string(header.size()),
                       line_no, cells.size());
    }
    const std::string& id = cells[patient_col];
    auto [it, inserted] = by_patient.try_emplace(id);
    if (inserted) order.push_back(id);
    it->second.y.push_back(parse_cell(cells[target_col], line_no, target_col + 1));
    std::vector<double> row;
    row.reserve(feature_cols.size());
    for (const auto c : feature_cols) row.push_back(parse_cell(cells[c], line_no, c + 1));
    it->second.x.push_back(std::move(row));
  }
  if (order.empty()) throw EmptyInputError("CSV input has a header but no data rows");

  const Index p = static_cast<Index>(feature_cols.size()) + (options.add_intercept ? 1 : 0);
  std::vector<PatientBlock> blocks;
  blocks.reserve(order.size());
  for (const auto& id : order) {
    const Rows& rows = by_patient.at(id);
    PatientBlock b;
    b.patient_id = id;
    b.design.resize(static_cast<Index>(rows.y.size()), p);
    b.targets.resize(static_cast<Index>(rows.y.size()));
    for (std::size_t i = 0; i < rows.y.size(); ++i) {
      const auto r = static_cast<Index>(i);
      for (std::size_t j = 0; j < feature_cols.size(); ++j) {
        b.design(r, static_cast<Index>(j)) = rows.x[i][j];
      }
      if (options.add_intercept) b.design(r, p - 1) = 1.0;
      b.targets(r) = rows.y[i];
    }
    blocks.push_back(std::move(b));
  }

  std::optional<Index> intercept;
  if (options.add_intercept) {
    feature_names.emplace_back(kInterceptName);
    intercept = p - 1;
  } else {
    const auto it = std::find(feature_names.begin(), feature_names.end(), kInterceptName);
    if (it != feature_names.end()) intercept = static_cast<Index>(it - feature_names.begin());
  }
  return MultiTaskDataset(std::move(blocks), std::move(feature_names), intercept);
}

MultiTaskDataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), options);
}

std::string to_csv(const MultiTaskDataset& dataset, const CsvOptions& options) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << options.patient_column << ',' << options.target_column;
  for (const auto& name : dataset.feature_names()) out << ',' << name;
  out << '\n';
  for (const auto& b : dataset.blocks()) {
    for (Index i = 0; i < b.rows(); ++i) {
      out << b.patient_id << ',' << b.targets(i);
      for (Index j = 0; j < b.design.cols(); ++j) out << ',' << b.design(i, j);
      out << '\n';
    }
  }
  return out.str();
}

void write_csv(const MultiTaskDataset& dataset, const std::filesystem::path& path,
               const CsvOptions& options) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << to_csv(dataset, options);
}

// ---------------------------------------------------------------------------
// Synthetic populations

namespace {

std::string patient_name(std::size_t k) { return "p" + std::to_string(k + 1); }

std::vector<std::string> numbered_features(Index p) {
  std::vector<std::string> names;
  for (Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
  return names;
}

// Draws one design/target block for patient k. Gaussian columns are standard normal,
// constant columns take the patient's fixed value.
PatientBlock draw_block(const TruePopulation& pop, std::size_t k, Index rows, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index p = static_cast<Index>(pop.columns.size());
  PatientBlock b;
  b.patient_id = pop.patient_ids[k];
  b.design.resize(rows, p);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < p; ++j) {
      const ColumnSpec& spec = pop.columns[static_cast<std::size_t>(j)];
      b.design(i, j) = spec.kind == ColumnSpec::Kind::gaussian ? normal(rng)
                                                               : spec.per_patient_value[k];
    }
  }
  b.targets = b.design * pop.coefficients[k];
  for (Index i = 0; i < rows; ++i) b.targets(i) += pop.noise_sd * normal(rng);
  return b;
}

MultiTaskDataset draw_dataset(const TruePopulation& pop, Index rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<PatientBlock> blocks;
  blocks.reserve(pop.num_patients());
  for (std::size_t k = 0; k < pop.num_patients(); ++k) {
    blocks.push_back(draw_block(pop, k, rows, rng));
  }
  return MultiTaskDataset(std::move(blocks), pop.feature_names, pop.intercept_column);
}

TruePopulation gaussian_population(Index p, std::vector<Vector> coefficients, std::uint64_t seed) {
  TruePopulation pop;
  for (std::size_t k = 0; k < coefficients.size(); ++k) pop.patient_ids.push_back(patient_name(k));
  pop.feature_names = numbered_features(p);
  pop.columns.assign(static_cast<std::size_t>(p), ColumnSpec{});
  pop.coefficients = std::move(coefficients);
  pop.patient_type.assign(pop.coefficients.size(), 0);
  pop.noise_sd = 1.0;
  pop.seed = seed;
  return pop;
}

}  // namespace

SyntheticData generate_small_example(std::uint64_t seed) {
  Vector shared(4), flipped(4), other(4);
  shared << 0, 0, 3, 3;
  flipped << 0, 0, -3, 3;
  other << 0, 3, 0, 3;
  TruePopulation pop = gaussian_population(4, {shared, shared, shared, flipped, other}, seed);
  MultiTaskDataset data = draw_dataset(pop, 64, seed);
  return {std::move(data), std::move(pop)};
}

std::vector<Vector> tau_vectors(Index p) {
  if (p < 8 || p % 8 != 0) throw ArgumentError("p must be a positive multiple of 8");
  Vector tau1 = Vector::Zero(p), tau2 = Vector::Zero(p), tau3 = Vector::Zero(p);
  tau1.head(p / 4).setConstant(3.0);
  for (Index j = 0; j < p / 2; ++j) tau2(j) = (j % 2 == 0) ? 3.0 : -3.0;
  for (Index j = 0; j < p / 8; ++j) tau3(j) = (j % 2 == 0) ? -3.0 : 3.0;
  return {tau1, tau2, tau3};
}

SyntheticData generate_tau_population(Index p, Index kappa, Index n_per_patient,
                                      std::uint64_t seed) {
  if (kappa < 8 || kappa % 8 != 0) throw ArgumentError("kappa must be a positive multiple of 8");
  if (n_per_patient < 1) throw ArgumentError("n_per_patient must be >= 1");
  const auto taus = tau_vectors(p);

  // Patients ordered as tau^2 block, tau^3 block, then tau^1.
  std::vector<Vector> coefficients;
  std::vector<int> types;
  for (Index k = 0; k < kappa; ++k) {
    const int type = k < kappa / 8 ? 2 : (k < kappa / 4 ? 3 : 1);
    coefficients.push_back(taus[static_cast<std::size_t>(type - 1)]);
    types.push_back(type);
  }
  TruePopulation pop = gaussian_population(p, std::move(coefficients), seed);
  pop.patient_type = std::move(types);
  MultiTaskDataset data = draw_dataset(pop, n_per_patient, seed);
  return {std::move(data), std::move(pop)};
}

OutlierScenario generate_outlier_scenario(Index kappa, Index n_per_patient, Index p, double c,
                                          double z_probability, std::uint64_t seed) {
  if (kappa < 1 || n_per_patient < 1 || p < 1) {
    throw ArgumentError("kappa, n_per_patient and p must be >= 1");
  }
  if (!(z_probability >= 0.0 && z_probability <= 1.0)) {
    throw ArgumentError("z_probability must lie in [0, 1]");
  }
  if (!std::isfinite(c)) throw ArgumentError("c must be finite");

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution bernoulli(z_probability);
  std::vector<bool> z(static_cast<std::size_t>(kappa));
  for (auto&& zk : z) zk = bernoulli(rng);

  TruePopulation pop;
  for (Index k = 0; k < kappa; ++k) pop.patient_ids.push_back(patient_name(static_cast<std::size_t>(k)));
  pop.feature_names = numbered_features(p);
  pop.feature_names.emplace_back(kInterceptName);
  pop.columns.assign(static_cast<std::size_t>(p), ColumnSpec{});
  pop.columns.push_back(
      ColumnSpec{ColumnSpec::Kind::constant, std::vector<double>(static_cast<std::size_t>(kappa), 1.0)});
  pop.intercept_column = p;
  for (Index k = 0; k < kappa; ++k) {
    Vector theta = Vector::Zero(p + 1);
    theta(0) = 1.0;
    theta(p) = 1.0 + (z[static_cast<std::size_t>(k)] ? c : 0.0);
    pop.coefficients.push_back(theta);
  }
  pop.patient_type.assign(static_cast<std::size_t>(kappa), 0);
  pop.noise_sd = 1.0;
  pop.seed = seed;

  std::vector<PatientBlock> blocks;
  for (std::size_t k = 0; k < pop.num_patients(); ++k) {
    blocks.push_back(draw_block(pop, k, n_per_patient, rng));
  }
  MultiTaskDataset data(std::move(blocks), pop.feature_names, pop.intercept_column);
  return {std::move(data), std::move(pop), std::move(z)};
}

SyntheticData append_patient_covariate(const MultiTaskDataset& dataset,
                                       const TruePopulation& population, const std::string& name,
                                       const std::vector<double>& per_patient_value) {
  if (per_patient_value.size() != dataset.num_patients() ||
      population.num_patients() != dataset.num_patients()) {
    throw ArgumentError("covariate needs one value per patient");
  }
  std::vector<PatientBlock> blocks = dataset.blocks();
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    auto& b = blocks[k];
    Matrix widened(b.rows(), b.design.cols() + 1);
    widened.leftCols(b.design.cols()) = b.design;
    widened.col(b.design.cols()).setConstant(per_patient_value[k]);
    b.design = std::move(widened);
  }
  std::vector<std::string> names = dataset.feature_names();
  names.push_back(name);

  TruePopulation pop = population;
  pop.feature_names.push_back(name);
  pop.columns.push_back(ColumnSpec{ColumnSpec::Kind::constant, per_patient_value});
  for (auto& theta : pop.coefficients) {
    Vector widened = Vector::Zero(theta.size() + 1);
    widened.head(theta.size()) = theta;
    theta = std::move(widened);
  }
  MultiTaskDataset data(std::move(blocks), std::move(names), dataset.intercept_column());
  return {std::move(data), std::move(pop)};
}

MultiTaskDataset holdout_testset(const TruePopulation& population, Index n_test,
                                 std::uint64_t seed) {
  if (n_test < 1) throw ArgumentError("n_test must be >= 1");
  return draw_dataset(population, n_test, seed);
}

}  // namespace glop
