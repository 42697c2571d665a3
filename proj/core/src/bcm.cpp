#include <glop/bcm.hpp>
#include <glop/lasso.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace glop {

namespace {

// Sufficient statistics of one patient block, with its loss scale folded in.
struct BlockStats {
  Matrix gram;
  Vector xty;
  double yty = 0.0;
  double scale = 1.0;
};

std::vector<BlockStats> block_stats(const MultiTaskDataset& data, const GlopPenalty& penalty) {
  std::vector<BlockStats> stats;
  stats.reserve(data.num_patients());
  for (const auto& b : data.blocks()) {
    BlockStats s;
    s.gram = b.design.transpose() * b.design;
    s.xty = b.design.transpose() * b.targets;
    s.yty = b.targets.squaredNorm();
    s.scale = penalty.loss_scale(b.rows());
    stats.push_back(std::move(s));
  }
  return stats;
}

Vector global_weights(const GlopPenalty& penalty, Index p) {
  Vector w(p);
  for (Index j = 0; j < p; ++j) w(j) = penalty.lambda_g * penalty.global_weight(j);
  return w;
}

double quad_loss(const BlockStats& s, const Vector& beta) {
  return s.scale * std::max(s.yty - 2.0 * beta.dot(s.xty) + beta.dot(s.gram * beta), 0.0);
}

double objective_from_stats(const std::vector<BlockStats>& stats, const Vector& g, const Matrix& l,
                            const Vector& gw, double lambda_l) {
  double value = gw.dot(g.cwiseAbs()) + lambda_l * l.cwiseAbs().sum();
  for (std::size_t k = 0; k < stats.size(); ++k) {
    value += quad_loss(stats[k], g + l.col(static_cast<Index>(k)));
  }
  return value;
}

// Pooled g-subproblem for fixed L: sum_k scale_k ||(y^k - X^k L_k) - X^k g||^2.
GramLassoProblem global_problem(const std::vector<BlockStats>& stats, const Matrix& pooled_gram,
                                const Matrix& l, const Vector& gw) {
  GramLassoProblem prob;
  prob.gram = pooled_gram;
  prob.xty = Vector::Zero(pooled_gram.cols());
  prob.yty = 0.0;
  for (std::size_t k = 0; k < stats.size(); ++k) {
    const auto& s = stats[k];
    const Vector gl = s.gram * l.col(static_cast<Index>(k));
    prob.xty.noalias() += s.scale * (s.xty - gl);
    prob.yty += s.scale * (s.yty - 2.0 * l.col(static_cast<Index>(k)).dot(s.xty) +
                           l.col(static_cast<Index>(k)).dot(gl));
  }
  prob.penalty_weights = gw;
  prob.loss_scale = 1.0;
  return prob;
}

// Per-patient L_k subproblem for fixed g.
GramLassoProblem local_problem(const BlockStats& s, const Vector& g, double lambda_l) {
  GramLassoProblem prob;
  const Vector gg = s.gram * g;
  prob.gram = s.gram;
  prob.xty = s.xty - gg;
  prob.yty = s.yty - 2.0 * g.dot(s.xty) + g.dot(gg);
  prob.penalty_weights = Vector::Constant(g.size(), lambda_l);
  prob.loss_scale = s.scale;
  return prob;
}

Matrix pooled_gram(const std::vector<BlockStats>& stats, Index p) {
  Matrix g = Matrix::Zero(p, p);
  for (const auto& s : stats) g.noalias() += s.scale * s.gram;
  return g;
}

Vector kkt_from_stats(const std::vector<BlockStats>& stats, const Vector& g, const Matrix& l,
                      const Vector& gw, double lambda_l) {
  const Index p = g.size();
  const auto kappa = static_cast<Index>(stats.size());
  Vector out(p * (kappa + 1));
  Vector grad_g = Vector::Zero(p);
  for (Index k = 0; k < kappa; ++k) {
    const auto& s = stats[static_cast<std::size_t>(k)];
    const Vector grad_k = -2.0 * s.scale * (s.xty - s.gram * (g + l.col(k)));
    grad_g += grad_k;
    out.segment(p * (k + 1), p) =
        kkt_residuals_from_gradient(grad_k, Vector::Constant(p, lambda_l), l.col(k));
  }
  out.head(p) = kkt_residuals_from_gradient(grad_g, gw, g);
  return out;
}

double zero_gradient_scale(const std::vector<BlockStats>& stats, Index p) {
  Vector grad_g = Vector::Zero(p);
  double scale = 0.0;
  for (const auto& s : stats) {
    const Vector grad_k = 2.0 * s.scale * s.xty;
    grad_g += grad_k;
    scale = std::max(scale, grad_k.cwiseAbs().maxCoeff());
  }
  return std::max(scale, grad_g.cwiseAbs().maxCoeff());
}

void check_finite(const MultiTaskDataset& data) {
  for (const auto& b : data.blocks()) {
    if (!b.design.allFinite() || !b.targets.allFinite()) {
      throw NumericalError("non-finite data in patient '" + b.patient_id + "'");
    }
  }
}

}  // namespace

Vector glop_kkt_residuals(const MultiTaskDataset& dataset, const Vector& global,
                          const Matrix& local, const GlopPenalty& penalty) {
  penalty.validate(dataset.num_features());
  const auto stats = block_stats(dataset, penalty);
  return kkt_from_stats(stats, global, local, global_weights(penalty, dataset.num_features()),
                        penalty.lambda_l);
}

double glop_zero_gradient_scale(const MultiTaskDataset& dataset, const GlopPenalty& penalty) {
  return zero_gradient_scale(block_stats(dataset, penalty), dataset.num_features());
}

Vector solve_global_step(const MultiTaskDataset& dataset, const Matrix& local,
                         const GlopPenalty& penalty, const Vector& warm, double tolerance) {
  const Index p = dataset.num_features();
  const auto stats = block_stats(dataset, penalty);
  LassoOptions opt;
  opt.tolerance = tolerance;
  opt.warm_start = warm;
  return solve_weighted_lasso(global_problem(stats, pooled_gram(stats, p), local,
                                             global_weights(penalty, p)),
                              opt)
      .coefficients;
}

Matrix solve_local_step(const MultiTaskDataset& dataset, const Vector& global,
                        const GlopPenalty& penalty, const Matrix& warm, double tolerance) {
  const auto stats = block_stats(dataset, penalty);
  Matrix out = warm;
  for (std::size_t k = 0; k < stats.size(); ++k) {
    LassoOptions opt;
    opt.tolerance = tolerance;
    opt.warm_start = Vector(warm.col(static_cast<Index>(k)));
    out.col(static_cast<Index>(k)) =
        solve_weighted_lasso(local_problem(stats[k], global, penalty.lambda_l), opt).coefficients;
  }
  return out;
}

BcmResult solve_glop_bcm_detailed(const MultiTaskDataset& dataset, const GlopPenalty& penalty,
                                  const BcmOptions& options) {
  const Index p = dataset.num_features();
  const auto kappa = static_cast<Index>(dataset.num_patients());
  penalty.validate(p);
  if (!(options.tolerance > 0.0)) throw ArgumentError("tolerance must be positive");
  if (options.max_sweeps < 1) throw ArgumentError("max_sweeps must be >= 1");
  check_finite(dataset);

  const auto stats = block_stats(dataset, penalty);
  const Matrix gram_g = pooled_gram(stats, p);
  const Vector gw = global_weights(penalty, p);

  Vector g = Vector::Zero(p);
  Matrix l = Matrix::Zero(p, kappa);
  if (options.init_global) {
    if (options.init_global->size() != p) throw ArgumentError("init_global has wrong length");
    g = *options.init_global;
  }
  if (options.init_local) {
    if (options.init_local->rows() != p || options.init_local->cols() != kappa) {
      throw ArgumentError("init_local has wrong shape");
    }
    l = *options.init_local;
  }

  BcmResult result;
  std::vector<std::string> warnings;
  const double kkt_scale = std::max(1.0, zero_gradient_scale(stats, p));
  double previous = objective_from_stats(stats, g, l, gw, penalty.lambda_l);
  if (options.record_objective_trace) result.objective_trace.push_back(previous);

  LassoOptions inner;
  inner.max_iterations = options.inner_max_iterations;
  // Inner solves start loose and tighten with the outer progress; convergence is only
  // accepted once they run at options.inner_tolerance.
  double inner_tol = std::max(options.inner_tolerance, 1e-3);

  int sweeps = 0;
  bool converged = false;
  while (sweeps < options.max_sweeps) {
    ++sweeps;
    inner.tolerance = inner_tol;
    double max_change = 0.0;

    inner.warm_start = g;
    auto gsol = solve_weighted_lasso(global_problem(stats, gram_g, l, gw), inner);
    max_change = (gsol.coefficients - g).cwiseAbs().maxCoeff();
    g = std::move(gsol.coefficients);
    for (const auto& w : gsol.warnings) warnings.push_back("global step: " + w);

    for (Index k = 0; k < kappa; ++k) {
      inner.warm_start = Vector(l.col(k));
      auto lsol = solve_weighted_lasso(
          local_problem(stats[static_cast<std::size_t>(k)], g, penalty.lambda_l), inner);
      max_change = std::max(max_change, (lsol.coefficients - l.col(k)).cwiseAbs().maxCoeff());
      l.col(k) = lsol.coefficients;
    }
    if (!g.allFinite() || !l.allFinite()) throw NumericalError("BCM produced non-finite values");

    const double current = objective_from_stats(stats, g, l, gw, penalty.lambda_l);
    if (options.record_objective_trace) result.objective_trace.push_back(current);
    const double decrease = (previous - current) / std::max(std::abs(previous), 1e-300);
    previous = current;
    const bool exact_inner = inner_tol <= options.inner_tolerance;
    inner_tol = std::clamp(1e-2 * max_change, options.inner_tolerance, inner_tol);
    if (!exact_inner || decrease > options.tolerance) continue;
    if (options.kkt_tolerance < 0.0 ||
        kkt_from_stats(stats, g, l, gw, penalty.lambda_l).maxCoeff() <=
            options.kkt_tolerance * kkt_scale) {
      converged = true;
      break;
    }
  }

  GlopModel& model = result.model;
  model.global = std::move(g);
  model.local = std::move(l);
  model.penalty = penalty;
  model.sweeps = sweeps;
  model.converged = converged;
  model.feature_names = dataset.feature_names();
  model.patient_ids = dataset.patient_ids();
  model.objective = glop_objective(dataset, model.global, model.local, penalty);
  if (!std::isfinite(model.objective)) throw NumericalError("non-finite gLOP objective");
  std::sort(warnings.begin(), warnings.end());
  warnings.erase(std::unique(warnings.begin(), warnings.end()), warnings.end());
  model.warnings = std::move(warnings);
  result.max_kkt_violation =
      kkt_from_stats(stats, model.global, model.local, gw, penalty.lambda_l).maxCoeff();
  return result;
}

GlopModel solve_glop_bcm(const MultiTaskDataset& dataset, const GlopPenalty& penalty,
                         const BcmOptions& options) {
  return solve_glop_bcm_detailed(dataset, penalty, options).model;
}

}  // namespace glop
