#pragma once

#include <glop/bcm.hpp>
#include <glop/dataset.hpp>
#include <glop/model.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace glop {

/// 0, 5, ..., 100
std::vector<double> default_grid_values();

struct GridCell {
  double lambda_g = 0.0;
  double lambda_l = 0.0;

  bool operator==(const GridCell&) const = default;
};

struct CvGrid {
  std::vector<double> lambda_g_values = default_grid_values();
  std::vector<double> lambda_l_values = default_grid_values();
  /// Keep only cells with lambda_g <= lambda_L.
  bool global_at_most_local = true;
  int folds = 10;
  std::uint64_t seed = 0;

  /// Throws ArgumentError for negative, non-finite or unsorted values, or folds < 2.
  void validate() const;
  /// Admissible cells, lambda_L-major then lambda_g, both ascending.
  std::vector<GridCell> cells() const;
};

struct ScoreRow {
  double lambda_g = 0.0;
  double lambda_l = 0.0;
  double score = 0.0;
  int n_failed_folds = 0;
};

struct SelectionResult {
  GridCell chosen;
  double best_score = 0.0;
  std::string criterion;  ///< "cv" or "bic"
  LossScaling loss_scaling = LossScaling::per_patient_half_n;
  std::vector<ScoreRow> score_table;
  /// Cells whose score ties the minimum, in table order.
  std::vector<GridCell> tied_cells;
  /// One line per tie-break step.
  std::vector<std::string> ties_broken;
  std::vector<GridCell> failed_cells;
  std::vector<std::string> warnings;
};

/// Relative resolution at which two scores count as tied.
inline constexpr double kScoreTieTolerance = 1e-12;

/// Minimal score wins; ties go to the larger lambda_L, then the larger lambda_g.
/// Rows with a non-finite score are ignored. Throws SelectionError when none remain.
SelectionResult select_from_scores(std::vector<ScoreRow> table,
                                   double tie_tolerance = kScoreTieTolerance);

/// Fold index of every row, per patient.
struct FoldAssignment {
  int folds = 0;
  std::vector<std::vector<int>> fold_of_row;
  /// Patients with fewer rows than folds.
  std::vector<std::string> short_patients;
};

/// Within each patient, rows are shuffled and dealt round-robin from a rotating
/// offset, so per-fold counts differ by at most one.
FoldAssignment stratified_folds(const MultiTaskDataset& dataset, int folds, std::uint64_t seed);

/// Training and validation rows for one fold.
struct FoldSplit {
  /// Patients that keep at least one training row.
  std::optional<MultiTaskDataset> train;
  /// One block per original patient (possibly with zero rows).
  std::vector<PatientBlock> validation;
  /// Index into train for each original patient, empty when it has no training rows.
  std::vector<std::optional<Index>> train_index;
};

FoldSplit split_fold(const MultiTaskDataset& dataset, const FoldAssignment& assignment, int fold);

/// Validation MSE of a gLOP model on a split. Patients without training rows are
/// predicted with g alone.
double validation_mse(const GlopModel& model, const FoldSplit& split);

/// Fits every cell on split.train and returns the validation MSE for each, NaN on
/// failure. Cells arrive in grid order; the callee may visit them in any order.
using FoldFitter =
    std::function<std::vector<double>(const FoldSplit& split, const std::vector<GridCell>& cells)>;

/// Scores each cell by its mean validation MSE over folds. Cells where every fold
/// fails are excluded; partial failures are scored on the remaining folds.
SelectionResult cross_validate(const MultiTaskDataset& dataset, const std::vector<GridCell>& cells,
                               int folds, std::uint64_t seed, const FoldFitter& fitter,
                               int threads = 1);

struct SelectionOptions {
  LossScaling loss_scaling = LossScaling::per_patient_half_n;
  std::vector<double> global_feature_weights;
  BcmOptions bcm;
  int threads = 1;
};

/// Visiting order for warm starts: lambda_L descending, lambda_g snaking.
std::vector<std::size_t> warm_start_order(const std::vector<GridCell>& cells);

SelectionResult cv_grid_search(const MultiTaskDataset& dataset, const CvGrid& grid,
                               const SelectionOptions& options = {});

/// N ln(RSS / N) + df ln(N), df = nonzeros in g plus nonzeros in L.
/// Returns -infinity when RSS is zero and appends a warning if a sink is given.
double bic_score(const MultiTaskDataset& dataset, const GlopModel& model,
                 std::vector<std::string>* warnings = nullptr);

/// Nonzero count of g plus L.
Index degrees_of_freedom(const GlopModel& model);

/// Cells whose fit has df >= N are saturated and left out of the score table.
SelectionResult bic_grid_select(const MultiTaskDataset& dataset, const CvGrid& grid,
                                const SelectionOptions& options = {});

}  // namespace glop
