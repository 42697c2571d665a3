#pragma once

#include <glop/dataset.hpp>
#include <glop/model.hpp>
#include <glop/stacked.hpp>

#include <string>
#include <vector>

namespace glop {

struct PathEvent {
  enum class Kind { start, enter, drop, end };
  Kind kind = Kind::start;
  Index column = -1;
};

std::string to_string(PathEvent::Kind kind);

/// Piecewise-linear lasso path for  loss_scale ||y - X b||^2 + lambda ||b||_1.
/// Knot 0 is lambda_max with the zero solution; lambda strictly decreases.
struct RegularizationPath {
  std::vector<double> knots;
  std::vector<Vector> coefficients;       ///< one vector per knot
  std::vector<std::vector<PathEvent>> events;  ///< what happened at each knot
  std::vector<double> knot_kkt_violation;  ///< max KKT violation at each knot
  double loss_scale = 0.5;
  double lambda_max = 0.0;
  /// Stopped early because the active design lost full column rank.
  bool truncated = false;
  /// Reached lambda = 0 with a full-rank active design.
  bool reached_zero = false;
  /// Every knot was checked against the optimality conditions.
  bool verified_pointwise = false;
  std::string stop_reason;

  std::size_t num_knots() const { return knots.size(); }
  double last_lambda() const { return knots.back(); }
};

struct LarsOptions {
  int max_knots = 10000;
  /// Lowest lambda computed, as a fraction of lambda_max. 0 descends to the
  /// least-squares end of the path when the active design stays full rank.
  double min_lambda_ratio = 1e-8;
  /// Relative resolution below which two entry events count as a tie.
  double tie_tolerance = 1e-10;
  /// Singular-value ratio below which the active design counts as rank deficient.
  double rank_tolerance = 1e-10;
  double loss_scale = 0.5;
};

/// Raised when two columns enter the path at the same lambda.
class TieError : public Error {
 public:
  TieError(const std::string& what, std::vector<Index> columns)
      : Error(what), columns_(std::move(columns)) {}
  const std::vector<Index>& columns() const { return columns_; }

 private:
  std::vector<Index> columns_;
};

/// Lasso variant of least angle regression.
RegularizationPath lars_lasso_path(const Matrix& design, const Vector& response,
                                   const LarsOptions& options = {});

/// Linear interpolation between the bracketing knots. lambda >= lambda_max gives zero.
Vector path_eval(const RegularizationPath& path, double lambda);

/// Fixed-ratio gLOP path: lambda_g = lambda * ref_g, lambda_L = lambda * ref_L.
class GlopPath {
 public:
  GlopPath(StackedDesign design, RegularizationPath path, LossScaling scaling);

  const StackedDesign& design() const { return design_; }
  const RegularizationPath& path() const { return path_; }
  double reference_lambda_g() const { return design_.reference_lambda_g; }
  double reference_lambda_l() const { return design_.reference_lambda_l; }
  LossScaling loss_scaling() const { return scaling_; }

  /// (g, L) at scalar lambda, i.e. at penalties (lambda*ref_g, lambda*ref_L).
  GlopModel model_at(double lambda) const;

 private:
  StackedDesign design_;
  RegularizationPath path_;
  LossScaling scaling_;
};

struct GlopPathOptions {
  LossScaling loss_scaling = LossScaling::per_patient_half_n;
  LarsOptions lars;  ///< loss_scale is overwritten from loss_scaling
  std::vector<double> global_feature_weights;
};

GlopPath glop_path(const MultiTaskDataset& dataset, double reference_lambda_g,
                   double reference_lambda_l, const GlopPathOptions& options = {});

}  // namespace glop
