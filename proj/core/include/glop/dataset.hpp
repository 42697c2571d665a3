#pragma once

#include <glop/types.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace glop {

/// Rows belonging to one patient: an n_k x p design and n_k targets.
struct PatientBlock {
  std::string patient_id;
  Matrix design;
  Vector targets;

  Index rows() const { return design.rows(); }
};

/// Ordered collection of patient blocks sharing one feature schema.
///
/// Construction validates the invariants (at least one patient, common p,
/// finite entries, distinct ids, an optional constant-one intercept column);
/// the object is immutable afterwards.
class MultiTaskDataset {
 public:
  MultiTaskDataset(std::vector<PatientBlock> blocks, std::vector<std::string> feature_names,
                   std::optional<Index> intercept_column = std::nullopt);

  const std::vector<PatientBlock>& blocks() const { return blocks_; }
  const PatientBlock& block(std::size_t k) const { return blocks_.at(k); }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  std::optional<Index> intercept_column() const { return intercept_column_; }
  bool has_intercept_column() const { return intercept_column_.has_value(); }

  std::size_t num_patients() const { return blocks_.size(); }
  Index num_features() const { return static_cast<Index>(feature_names_.size()); }
  Index total_rows() const;
  bool equal_sizes() const;
  std::vector<std::string> patient_ids() const;

  /// Vertical concatenation of all designs / targets in patient order.
  Matrix pooled_design() const;
  Vector pooled_targets() const;

 private:
  std::vector<PatientBlock> blocks_;
  std::vector<std::string> feature_names_;
  std::optional<Index> intercept_column_;
};

/// How one feature column is generated by a synthetic population.
struct ColumnSpec {
  enum class Kind { gaussian, constant };
  Kind kind = Kind::gaussian;
  /// Per-patient value for constant columns (intercept, patient-level covariates).
  std::vector<double> per_patient_value;
};

/// True generating parameters of a synthetic population.
struct TruePopulation {
  std::vector<std::string> patient_ids;
  std::vector<std::string> feature_names;
  std::vector<ColumnSpec> columns;
  std::vector<Vector> coefficients;  ///< theta^k, one per patient
  std::vector<int> patient_type;     ///< tau index (1..3) where applicable, else 0
  std::optional<Index> intercept_column;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;

  std::size_t num_patients() const { return coefficients.size(); }
};

struct SyntheticData {
  MultiTaskDataset dataset;
  TruePopulation population;
};

struct OutlierScenario {
  MultiTaskDataset dataset;
  TruePopulation population;
  std::vector<bool> is_outlier;  ///< Z_k per patient
};

struct CsvOptions {
  std::string patient_column = "patient_id";
  std::string target_column = "y";
  bool add_intercept = false;
};

inline constexpr const char* kInterceptName = "_intercept";

MultiTaskDataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
MultiTaskDataset parse_csv(const std::string& text, const CsvOptions& options = {});
/// Long-format CSV with values at 17 significant digits.
void write_csv(const MultiTaskDataset& dataset, const std::filesystem::path& path,
               const CsvOptions& options = {});
std::string to_csv(const MultiTaskDataset& dataset, const CsvOptions& options = {});

/// p = 4, kappa = 5, n = 64 example with hand-picked coefficient vectors.
SyntheticData generate_small_example(std::uint64_t seed);

/// Three-type population: kappa/8 patients of tau^2, kappa/8 of tau^3, the rest tau^1.
SyntheticData generate_tau_population(Index p, Index kappa, Index n_per_patient,
                                      std::uint64_t seed);
/// The tau^1..tau^3 coefficient vectors for a given p (p divisible by 8).
std::vector<Vector> tau_vectors(Index p);

/// Y = 1 + X + c Z + eps with p-1 distractor features and an intercept column;
/// Z ~ Bernoulli(z_probability) per patient and is not a column.
OutlierScenario generate_outlier_scenario(Index kappa, Index n_per_patient, Index p, double c,
                                          double z_probability, std::uint64_t seed);

/// Appends a patient-level constant covariate (e.g. the hidden Z) as a new last feature
/// column. The generating process is unchanged: the new column enters the population
/// with a zero coefficient and its effect stays where the population already carries it.
SyntheticData append_patient_covariate(const MultiTaskDataset& dataset,
                                       const TruePopulation& population, const std::string& name,
                                       const std::vector<double>& per_patient_value);

/// Fresh draws from the same population: n_test rows per patient.
MultiTaskDataset holdout_testset(const TruePopulation& population, Index n_test,
                                 std::uint64_t seed);

}  // namespace glop
