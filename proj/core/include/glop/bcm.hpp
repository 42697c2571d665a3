#pragma once

#include <glop/dataset.hpp>
#include <glop/model.hpp>

#include <optional>
#include <vector>

namespace glop {

struct BcmOptions {
  /// Stop once a full (g, L) sweep lowers the objective by at most this fraction.
  double tolerance = 1e-9;
  /// Joint first-order violation allowed at convergence, relative to the largest
  /// loss gradient at the zero model. Negative disables the check.
  double kkt_tolerance = 1e-8;
  int max_sweeps = 10000;
  /// Coordinate-change tolerance for the inner lasso solves.
  double inner_tolerance = 1e-12;
  int inner_max_iterations = 100000;
  std::optional<Vector> init_global;
  std::optional<Matrix> init_local;
  bool record_objective_trace = false;
};

struct BcmResult {
  GlopModel model;
  std::vector<double> objective_trace;  ///< objective at init, then after each sweep
  double max_kkt_violation = 0.0;       ///< absolute joint violation at the returned point
};

/// Alternates the pooled lasso for g (targets adjusted by each X^k L_k) with one
/// independent lasso per patient for L_k (targets adjusted by X^k g).
BcmResult solve_glop_bcm_detailed(const MultiTaskDataset& dataset, const GlopPenalty& penalty,
                                  const BcmOptions& options = {});
GlopModel solve_glop_bcm(const MultiTaskDataset& dataset, const GlopPenalty& penalty,
                         const BcmOptions& options = {});

/// Joint first-order violations, ordered [g (p entries), L_1, ..., L_kappa].
Vector glop_kkt_residuals(const MultiTaskDataset& dataset, const Vector& global,
                          const Matrix& local, const GlopPenalty& penalty);

/// Largest |gradient| of the loss at the zero model, over all g and L coordinates.
double glop_zero_gradient_scale(const MultiTaskDataset& dataset, const GlopPenalty& penalty);

/// The two block steps, exposed for fixed-point checks.
Vector solve_global_step(const MultiTaskDataset& dataset, const Matrix& local,
                         const GlopPenalty& penalty, const Vector& warm, double tolerance = 1e-12);
Matrix solve_local_step(const MultiTaskDataset& dataset, const Vector& global,
                        const GlopPenalty& penalty, const Matrix& warm, double tolerance = 1e-12);

}  // namespace glop
