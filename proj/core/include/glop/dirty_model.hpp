#pragma once

#include <glop/dataset.hpp>
#include <glop/types.hpp>

#include <optional>
#include <string>
#include <vector>

namespace glop {

/// Euclidean projection onto {x : ||x||_1 <= radius}.
Vector project_l1_ball(const Vector& v, double radius);

/// argmin_x 1/2 ||x - v||^2 + tau ||x||_inf, via v - project_l1_ball(v, tau).
Vector prox_linf(const Vector& v, double tau);

/// Per-patient coefficients B_k + S_k, with B row-grouped (l1,inf) and S entrywise (l1,1).
struct DirtyModel {
  Matrix b;  ///< p x kappa
  Matrix s;  ///< p x kappa
  double lambda_b = 0.0;
  double lambda_s = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> feature_names;
  std::vector<std::string> patient_ids;
  std::vector<double> objective_trace;

  Vector patient_coefficients(Index k) const { return b.col(k) + s.col(k); }
};

struct DirtyModelOptions {
  double tolerance = 1e-10;  ///< relative objective decrease
  int max_iterations = 100000;
  /// Monotone momentum with restarts; plain proximal gradient when false.
  bool accelerated = true;
  std::optional<Matrix> init_b;
  std::optional<Matrix> init_s;
  bool record_objective_trace = false;
};

/// sum_k ||y^k - X^k (B_k + S_k)||^2 + lambda_b sum_j max_k |B_jk| + lambda_s sum |S_jk|
double dirty_objective(const MultiTaskDataset& dataset, const Matrix& b, const Matrix& s,
                       double lambda_b, double lambda_s);

/// Proximal gradient on (B, S) jointly with backtracking (factor 1/2) from 1/L,
/// L estimated by power iteration.
DirtyModel solve_dirty_model(const MultiTaskDataset& dataset, double lambda_b, double lambda_s,
                             const DirtyModelOptions& options = {});

/// MSE over every test row with each patient's B_k + S_k.
double evaluate_mse(const DirtyModel& model, const MultiTaskDataset& testset);

}  // namespace glop
