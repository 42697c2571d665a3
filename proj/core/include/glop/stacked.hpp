#pragma once

#include <glop/dataset.hpp>
#include <glop/lasso.hpp>
#include <glop/model.hpp>

#include <string>
#include <utility>
#include <vector>

namespace glop {

/// Role of one column of the stacked design.
struct ColumnRole {
  enum class Kind { global, local };
  Kind kind = Kind::global;
  Index patient = -1;  ///< 0-based patient for local columns, -1 for global
  Index feature = 0;   ///< 0-based feature

  bool operator==(const ColumnRole&) const = default;
};

/// Block design of the single-lasso view with penalties absorbed into the columns:
///
///   [ X^1/lg  X^1/lL  0      ...  0      ]
///   [ X^2/lg  0       X^2/lL ...  0      ]
///   [  ...                               ]
///   [ X^K/lg  0       0      ...  X^K/lL ]
///
/// Global block first (p columns), then one p-column local block per patient.
/// Global columns are additionally divided by their per-feature weight, if any.
struct StackedDesign {
  Matrix matrix;
  Vector response;
  std::vector<ColumnRole> column_map;
  double reference_lambda_g = 1.0;
  double reference_lambda_l = 1.0;
  std::vector<double> global_feature_weights;
  Index num_features = 0;
  Index num_patients = 0;
  Index rows_per_patient = 0;
  std::vector<std::string> feature_names;
  std::vector<std::string> patient_ids;

  Index cols() const { return matrix.cols(); }
  Index column_index(const ColumnRole& role) const;
  /// lambda_i for column i: lg * w_j for global columns, lL for local ones.
  double column_lambda(Index i) const;
};

/// Requires lambda_g, lambda_l > 0, positive global feature weights, and equal n_k.
StackedDesign build_stacked_design(const MultiTaskDataset& dataset, double lambda_g,
                                   double lambda_l,
                                   const std::vector<double>& global_feature_weights = {});

/// xi -> (g, L) via beta_i = xi_i / lambda_i.
std::pair<Vector, Matrix> unstack_coefficients(const StackedDesign& design, const Vector& xi);
/// (g, L) -> xi, the inverse of unstack_coefficients.
Vector stack_coefficients(const StackedDesign& design, const Vector& global, const Matrix& local);

/// Loss scale of the stacked problem for a loss scaling choice (1/(2n) or 1).
double stacked_loss_scale(const StackedDesign& design, LossScaling scaling);

/// The unit-penalty lasso loss_scale ||y - Xbar xi||^2 + ||xi||_1.
LassoProblem stacked_lasso_problem(const StackedDesign& design, LossScaling scaling,
                                   double path_lambda = 1.0);

struct StackedOptions {
  double tolerance = 1e-10;
  int max_iterations = 1000000;
};

/// Solve gLOP as one lasso on the stacked design and map back to (g, L).
GlopModel solve_glop_single_lasso(const MultiTaskDataset& dataset, const GlopPenalty& penalty,
                                  const StackedOptions& options = {});

}  // namespace glop
