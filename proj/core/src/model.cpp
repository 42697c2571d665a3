#include <glop/model.hpp>

#include <cmath>

namespace glop {

std::string to_string(LossScaling scaling) {
  switch (scaling) {
    case LossScaling::per_patient_half_n:
      return "per_patient_half_n";
    case LossScaling::unnormalized:
      return "unnormalized";
  }
  return "unknown";
}

LossScaling loss_scaling_from_string(const std::string& name) {
  if (name == "per_patient_half_n" || name == "half-n" || name == "half_n") {
    return LossScaling::per_patient_half_n;
  }
  if (name == "unnormalized") return LossScaling::unnormalized;
  throw ArgumentError("unknown loss scaling '" + name + "'");
}

void GlopPenalty::validate(Index p) const {
  if (!std::isfinite(lambda_g) || lambda_g < 0.0 || !std::isfinite(lambda_l) || lambda_l < 0.0) {
    throw ArgumentError("lambda_g and lambda_l must be finite and nonnegative");
  }
  if (!global_feature_weights.empty()) {
    if (static_cast<Index>(global_feature_weights.size()) != p) {
      throw ArgumentError("global_feature_weights must have one entry per feature");
    }
    for (double w : global_feature_weights) {
      if (!std::isfinite(w) || w < 0.0) throw ArgumentError("feature weights must be >= 0");
    }
  }
}

double GlopPenalty::global_weight(Index j) const {
  return global_feature_weights.empty() ? 1.0
                                        : global_feature_weights[static_cast<std::size_t>(j)];
}

double GlopPenalty::loss_scale(Index n_k) const {
  return loss_scaling == LossScaling::unnormalized ? 1.0 : 1.0 / (2.0 * static_cast<double>(n_k));
}

Vector GlopModel::patient_coefficients(Index k) const {
  if (k < 0 || k >= num_patients()) throw ArgumentError("patient index out of range");
  return global + local.col(k);
}

GlopModel GlopModel::zero(const MultiTaskDataset& dataset, const GlopPenalty& penalty) {
  GlopModel m;
  const Index p = dataset.num_features();
  m.global = Vector::Zero(p);
  m.local = Matrix::Zero(p, static_cast<Index>(dataset.num_patients()));
  m.penalty = penalty;
  m.feature_names = dataset.feature_names();
  m.patient_ids = dataset.patient_ids();
  m.objective = glop_objective(dataset, m.global, m.local, penalty);
  m.converged = true;
  return m;
}

double glop_objective(const MultiTaskDataset& dataset, const Vector& global, const Matrix& local,
                      const GlopPenalty& penalty) {
  const Index p = dataset.num_features();
  if (global.size() != p || local.rows() != p ||
      local.cols() != static_cast<Index>(dataset.num_patients())) {
    throw ArgumentError("model dimensions do not match the dataset");
  }
  penalty.validate(p);
  double value = 0.0;
  for (std::size_t k = 0; k < dataset.num_patients(); ++k) {
    const PatientBlock& b = dataset.block(k);
    const Vector r = b.targets - b.design * (global + local.col(static_cast<Index>(k)));
    value += penalty.loss_scale(b.rows()) * r.squaredNorm();
  }
  for (Index j = 0; j < p; ++j) value += penalty.lambda_g * penalty.global_weight(j) * std::abs(global(j));
  value += penalty.lambda_l * local.cwiseAbs().sum();
  return value;
}

double glop_objective(const MultiTaskDataset& dataset, const GlopModel& model) {
  return glop_objective(dataset, model.global, model.local, model.penalty);
}

Vector predict(const GlopModel& model, const Matrix& design, std::optional<Index> patient_index) {
  if (design.cols() != model.num_features()) {
    throw ArgumentError("design has " + std::to_string(design.cols()) + " columns, model has " +
                        std::to_string(model.num_features()));
  }
  if (!patient_index) return design * model.global;
  return design * model.patient_coefficients(*patient_index);
}

Vector predict(const GlopModel& model, const PatientBlock& block,
               std::optional<Index> patient_index) {
  return predict(model, block.design, patient_index);
}

double mse(const Vector& predictions, const Vector& targets) {
  if (predictions.size() != targets.size()) throw ArgumentError("mse: length mismatch");
  if (predictions.size() == 0) throw ArgumentError("mse: empty input");
  return (predictions - targets).squaredNorm() / static_cast<double>(predictions.size());
}

namespace {

void check_alignment(const GlopModel& model, const MultiTaskDataset& testset) {
  if (static_cast<Index>(testset.num_patients()) != model.num_patients()) {
    throw ArgumentError("test set has " + std::to_string(testset.num_patients()) +
                        " patients, model has " + std::to_string(model.num_patients()));
  }
  if (!model.patient_ids.empty()) {
    for (std::size_t k = 0; k < testset.num_patients(); ++k) {
      if (testset.block(k).patient_id != model.patient_ids[k]) {
        throw ArgumentError("test patient '" + testset.block(k).patient_id +
                            "' does not match model patient '" + model.patient_ids[k] + "'");
      }
    }
  }
}

double squared_error_sum(const GlopModel& model, const MultiTaskDataset& testset, bool in_population) {
  double sse = 0.0;
  for (std::size_t k = 0; k < testset.num_patients(); ++k) {
    const PatientBlock& b = testset.block(k);
    const std::optional<Index> idx =
        in_population ? std::optional<Index>(static_cast<Index>(k)) : std::nullopt;
    sse += (predict(model, b, idx) - b.targets).squaredNorm();
  }
  return sse;
}

}  // namespace

double evaluate_mse(const GlopModel& model, const MultiTaskDataset& testset) {
  check_alignment(model, testset);
  return squared_error_sum(model, testset, true) / static_cast<double>(testset.total_rows());
}

double evaluate_global_mse(const GlopModel& model, const MultiTaskDataset& testset) {
  if (testset.num_features() != model.num_features()) {
    throw ArgumentError("test set feature count does not match the model");
  }
  return squared_error_sum(model, testset, false) / static_cast<double>(testset.total_rows());
}

}  // namespace glop
