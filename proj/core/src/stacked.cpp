#include <glop/stacked.hpp>

#include <cmath>

namespace glop {

Index StackedDesign::column_index(const ColumnRole& role) const {
  if (role.feature < 0 || role.feature >= num_features) throw ArgumentError("feature out of range");
  if (role.kind == ColumnRole::Kind::global) return role.feature;
  if (role.patient < 0 || role.patient >= num_patients) throw ArgumentError("patient out of range");
  return num_features * (role.patient + 1) + role.feature;
}

double StackedDesign::column_lambda(Index i) const {
  const ColumnRole& role = column_map.at(static_cast<std::size_t>(i));
  if (role.kind == ColumnRole::Kind::local) return reference_lambda_l;
  const double w = global_feature_weights.empty()
                       ? 1.0
                       : global_feature_weights[static_cast<std::size_t>(role.feature)];
  return reference_lambda_g * w;
}

StackedDesign build_stacked_design(const MultiTaskDataset& dataset, double lambda_g,
                                   double lambda_l,
                                   const std::vector<double>& global_feature_weights) {
  if (!(lambda_g > 0.0) || !(lambda_l > 0.0) || !std::isfinite(lambda_g) ||
      !std::isfinite(lambda_l)) {
    throw ArgumentError("stacked design needs strictly positive, finite lambda_g and lambda_l");
  }
  const Index p = dataset.num_features();
  if (!global_feature_weights.empty()) {
    if (static_cast<Index>(global_feature_weights.size()) != p) {
      throw ArgumentError("global_feature_weights must have one entry per feature");
    }
    for (double w : global_feature_weights) {
      if (!(w > 0.0)) {
        throw ArgumentError("stacked design needs strictly positive global feature weights");
      }
    }
  }
  if (!dataset.equal_sizes()) {
    throw UnsupportedShapeError(
        "stacked design requires equal rows per patient; use the block coordinate solver");
  }

  const auto kappa = static_cast<Index>(dataset.num_patients());
  const Index n = dataset.block(0).rows();

  StackedDesign d;
  d.reference_lambda_g = lambda_g;
  d.reference_lambda_l = lambda_l;
  d.global_feature_weights = global_feature_weights;
  d.num_features = p;
  d.num_patients = kappa;
  d.rows_per_patient = n;
  d.feature_names = dataset.feature_names();
  d.patient_ids = dataset.patient_ids();
  d.matrix = Matrix::Zero(n * kappa, p * (kappa + 1));
  d.response = dataset.pooled_targets();

  Vector global_scale(p);
  for (Index j = 0; j < p; ++j) {
    global_scale(j) = lambda_g * (global_feature_weights.empty()
                                      ? 1.0
                                      : global_feature_weights[static_cast<std::size_t>(j)]);
  }
  for (Index k = 0; k < kappa; ++k) {
    const Matrix& x = dataset.block(static_cast<std::size_t>(k)).design;
    d.matrix.block(n * k, 0, n, p) = x * global_scale.cwiseInverse().asDiagonal();
    d.matrix.block(n * k, p * (k + 1), n, p) = x / lambda_l;
  }

  d.column_map.reserve(static_cast<std::size_t>(p * (kappa + 1)));
  for (Index j = 0; j < p; ++j) d.column_map.push_back({ColumnRole::Kind::global, -1, j});
  for (Index k = 0; k < kappa; ++k) {
    for (Index j = 0; j < p; ++j) d.column_map.push_back({ColumnRole::Kind::local, k, j});
  }
  return d;
}

std::pair<Vector, Matrix> unstack_coefficients(const StackedDesign& design, const Vector& xi) {
  if (xi.size() != design.cols()) {
    throw ArgumentError("xi has length " + std::to_string(xi.size()) + ", design has " +
                        std::to_string(design.cols()) + " columns");
  }
  Vector g(design.num_features);
  Matrix l(design.num_features, design.num_patients);
  for (Index i = 0; i < xi.size(); ++i) {
    const ColumnRole& role = design.column_map[static_cast<std::size_t>(i)];
    const double beta = xi(i) / design.column_lambda(i);
    if (role.kind == ColumnRole::Kind::global) {
      g(role.feature) = beta;
    } else {
      l(role.feature, role.patient) = beta;
    }
  }
  return {std::move(g), std::move(l)};
}

Vector stack_coefficients(const StackedDesign& design, const Vector& global, const Matrix& local) {
  if (global.size() != design.num_features || local.rows() != design.num_features ||
      local.cols() != design.num_patients) {
    throw ArgumentError("coefficient shapes do not match the stacked design");
  }
  Vector xi(design.cols());
  for (Index i = 0; i < xi.size(); ++i) {
    const ColumnRole& role = design.column_map[static_cast<std::size_t>(i)];
    const double beta = role.kind == ColumnRole::Kind::global ? global(role.feature)
                                                              : local(role.feature, role.patient);
    xi(i) = beta * design.column_lambda(i);
  }
  return xi;
}

double stacked_loss_scale(const StackedDesign& design, LossScaling scaling) {
  return scaling == LossScaling::unnormalized
             ? 1.0
             : 1.0 / (2.0 * static_cast<double>(design.rows_per_patient));
}

LassoProblem stacked_lasso_problem(const StackedDesign& design, LossScaling scaling,
                                   double path_lambda) {
  LassoProblem prob;
  prob.design = design.matrix;
  prob.response = design.response;
  prob.penalty_weights = Vector::Constant(design.cols(), path_lambda);
  prob.loss_scale = stacked_loss_scale(design, scaling);
  return prob;
}

GlopModel solve_glop_single_lasso(const MultiTaskDataset& dataset, const GlopPenalty& penalty,
                                  const StackedOptions& options) {
  penalty.validate(dataset.num_features());
  const StackedDesign design = build_stacked_design(dataset, penalty.lambda_g, penalty.lambda_l,
                                                    penalty.global_feature_weights);
  const GramLassoProblem prob = to_gram(stacked_lasso_problem(design, penalty.loss_scaling));
  LassoOptions opt;
  opt.tolerance = options.tolerance;
  opt.max_iterations = options.max_iterations;
  const LassoSolution sol = solve_weighted_lasso(prob, opt);

  auto [g, l] = unstack_coefficients(design, sol.coefficients);
  GlopModel model;
  model.global = std::move(g);
  model.local = std::move(l);
  model.penalty = penalty;
  model.sweeps = sol.iterations;
  model.converged = sol.converged;
  model.feature_names = dataset.feature_names();
  model.patient_ids = dataset.patient_ids();
  model.warnings = sol.warnings;
  model.objective = glop_objective(dataset, model.global, model.local, penalty);
  return model;
}

}  // namespace glop
