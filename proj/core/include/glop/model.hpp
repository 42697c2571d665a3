#pragma once

#include <glop/dataset.hpp>
#include <glop/types.hpp>

#include <optional>
#include <string>
#include <vector>

namespace glop {

/// How the squared loss of each patient is weighted in the objective.
enum class LossScaling {
  per_patient_half_n,  ///< 1 / (2 n_k) per patient
  unnormalized,        ///< plain sum of squares
};

std::string to_string(LossScaling scaling);
LossScaling loss_scaling_from_string(const std::string& name);

struct GlopPenalty {
  double lambda_g = 0.0;
  double lambda_l = 0.0;
  LossScaling loss_scaling = LossScaling::per_patient_half_n;
  /// Optional per-feature multiplier on lambda_g (empty means all ones). A zero entry
  /// leaves that global coefficient unpenalized, e.g. the intercept.
  std::vector<double> global_feature_weights;

  void validate(Index p) const;
  double global_weight(Index j) const;
  double loss_scale(Index n_k) const;
};

/// Fitted global vector g (length p) and local matrix L (p x kappa).
struct GlopModel {
  Vector global;
  Matrix local;
  GlopPenalty penalty;
  double objective = 0.0;
  int sweeps = 0;
  bool converged = false;
  std::vector<std::string> feature_names;
  std::vector<std::string> patient_ids;
  std::vector<std::string> warnings;

  Index num_features() const { return global.size(); }
  Index num_patients() const { return local.cols(); }
  /// beta^k = g + L_k
  Vector patient_coefficients(Index k) const;

  static GlopModel zero(const MultiTaskDataset& dataset, const GlopPenalty& penalty);
};

/// sum_k scale_k ||y^k - X^k (g + L_k)||^2 + lambda_g ||w o g||_1 + lambda_L ||L||_{1,1}
double glop_objective(const MultiTaskDataset& dataset, const Vector& global, const Matrix& local,
                      const GlopPenalty& penalty);
double glop_objective(const MultiTaskDataset& dataset, const GlopModel& model);

/// In-population prediction X (g + L_k) when a patient index is given, otherwise the
/// out-of-population prediction X g.
Vector predict(const GlopModel& model, const Matrix& design,
               std::optional<Index> patient_index = std::nullopt);
Vector predict(const GlopModel& model, const PatientBlock& block,
               std::optional<Index> patient_index = std::nullopt);

/// Mean squared error over every test row using in-population predictions.
/// Test patients must align by position (and id, when the model carries ids).
double evaluate_mse(const GlopModel& model, const MultiTaskDataset& testset);

/// Same, but predicting every patient with g alone.
double evaluate_global_mse(const GlopModel& model, const MultiTaskDataset& testset);

double mse(const Vector& predictions, const Vector& targets);

}  // namespace glop
