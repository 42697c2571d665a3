#pragma once

#include <glop/types.hpp>

#include <optional>
#include <string>
#include <vector>

namespace glop {

/// Weighted lasso:
///   minimize  loss_scale * ||y - X b||^2 + sum_i penalty_weights[i] * |b_i|
///
/// loss_scale = 1/2 gives the textbook lasso, 1/(2n) the averaged loss,
/// 1 the unnormalized sum of squares.
struct LassoProblem {
  Matrix design;
  Vector response;
  Vector penalty_weights;
  double loss_scale = 0.5;

  Index rows() const { return design.rows(); }
  Index cols() const { return design.cols(); }
  /// Throws ArgumentError when dimensions, weights or loss_scale are invalid.
  void validate() const;
};

/// Same problem given through its sufficient statistics X'X, X'y, y'y.
/// Used by the block solvers, which re-solve small subproblems many times.
struct GramLassoProblem {
  Matrix gram;
  Vector xty;
  double yty = 0.0;
  Vector penalty_weights;
  double loss_scale = 0.5;

  Index cols() const { return gram.cols(); }
  void validate() const;
};

struct LassoOptions {
  double tolerance = 1e-8;  ///< max absolute coordinate change in one sweep
  int max_iterations = 100000;
  std::optional<Vector> warm_start;
  bool record_objective_trace = false;
};

struct LassoSolution {
  Vector coefficients;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double max_kkt_violation = 0.0;
  std::vector<std::string> warnings;
  /// Objective after each full sweep (only when requested); entry 0 is the start point.
  std::vector<double> objective_trace;
};

/// sign(z) * max(|z| - gamma, 0)
inline double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

double lasso_objective(const LassoProblem& problem, const Vector& coefficients);
double lasso_objective(const GramLassoProblem& problem, const Vector& coefficients);

/// Gradient of the smooth part, -2 * loss_scale * X'(y - X b).
Vector loss_gradient(const LassoProblem& problem, const Vector& coefficients);
Vector loss_gradient(const GramLassoProblem& problem, const Vector& coefficients);

/// Per-coordinate violation of the subgradient optimality conditions.
Vector kkt_residuals(const LassoProblem& problem, const Vector& coefficients);
Vector kkt_residuals(const GramLassoProblem& problem, const Vector& coefficients);
Vector kkt_residuals_from_gradient(const Vector& gradient, const Vector& weights,
                                   const Vector& coefficients);

/// Cyclic coordinate descent on the residual.
LassoSolution solve_weighted_lasso(const LassoProblem& problem, const LassoOptions& options = {});

/// Cyclic coordinate descent in covariance form; same updates, O(m) per nonzero move.
LassoSolution solve_weighted_lasso(const GramLassoProblem& problem,
                                   const LassoOptions& options = {});

GramLassoProblem to_gram(const LassoProblem& problem);

/// Exact solution by enumerating all 3^m sign patterns. m <= 8.
LassoSolution brute_force_lasso_oracle(const LassoProblem& problem);

inline constexpr Index kOracleMaxColumns = 8;

}  // namespace glop
