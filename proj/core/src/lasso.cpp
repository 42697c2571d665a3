#include <glop/lasso.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace glop {

namespace {

void check_weights(const Vector& weights, Index m) {
  if (weights.size() != m) throw ArgumentError("penalty_weights length must equal column count");
  for (Index i = 0; i < m; ++i) {
    if (!std::isfinite(weights(i)) || weights(i) < 0.0) {
      throw ArgumentError("penalty weights must be finite and nonnegative");
    }
  }
}

void check_loss_scale(double loss_scale) {
  if (!(loss_scale > 0.0) || !std::isfinite(loss_scale)) {
    throw ArgumentError("loss_scale must be positive and finite");
  }
}

double penalty(const Vector& weights, const Vector& coefficients) {
  return weights.dot(coefficients.cwiseAbs());
}

Vector initial_point(const LassoOptions& options, Index m) {
  if (!options.warm_start) return Vector::Zero(m);
  if (options.warm_start->size() != m) throw ArgumentError("warm start has wrong length");
  return *options.warm_start;
}

}  // namespace

void LassoProblem::validate() const {
  if (response.size() != design.rows()) throw ArgumentError("response length must equal rows");
  check_weights(penalty_weights, design.cols());
  check_loss_scale(loss_scale);
}

void GramLassoProblem::validate() const {
  if (gram.rows() != gram.cols()) throw ArgumentError("gram matrix must be square");
  if (xty.size() != gram.cols()) throw ArgumentError("xty length must equal gram size");
  check_weights(penalty_weights, gram.cols());
  check_loss_scale(loss_scale);
}

double lasso_objective(const LassoProblem& problem, const Vector& coefficients) {
  const Vector r = problem.response - problem.design * coefficients;
  return problem.loss_scale * r.squaredNorm() + penalty(problem.penalty_weights, coefficients);
}

double lasso_objective(const GramLassoProblem& problem, const Vector& coefficients) {
  const double quad = problem.yty - 2.0 * coefficients.dot(problem.xty) +
                      coefficients.dot(problem.gram * coefficients);
  return problem.loss_scale * std::max(quad, 0.0) + penalty(problem.penalty_weights, coefficients);
}

Vector loss_gradient(const LassoProblem& problem, const Vector& coefficients) {
  return -2.0 * problem.loss_scale *
         (problem.design.transpose() * (problem.response - problem.design * coefficients));
}

Vector loss_gradient(const GramLassoProblem& problem, const Vector& coefficients) {
  return -2.0 * problem.loss_scale * (problem.xty - problem.gram * coefficients);
}

Vector kkt_residuals_from_gradient(const Vector& gradient, const Vector& weights,
                                   const Vector& coefficients) {
  Vector v(gradient.size());
  for (Index i = 0; i < gradient.size(); ++i) {
    const double b = coefficients(i);
    if (b > 0.0) {
      v(i) = std::abs(gradient(i) + weights(i));
    } else if (b < 0.0) {
      v(i) = std::abs(gradient(i) - weights(i));
    } else {
      v(i) = std::max(std::abs(gradient(i)) - weights(i), 0.0);
    }
  }
  return v;
}

Vector kkt_residuals(const LassoProblem& problem, const Vector& coefficients) {
  if (coefficients.size() != problem.cols()) throw ArgumentError("coefficient length mismatch");
  return kkt_residuals_from_gradient(loss_gradient(problem, coefficients), problem.penalty_weights,
                                     coefficients);
}

Vector kkt_residuals(const GramLassoProblem& problem, const Vector& coefficients) {
  if (coefficients.size() != problem.cols()) throw ArgumentError("coefficient length mismatch");
  return kkt_residuals_from_gradient(loss_gradient(problem, coefficients), problem.penalty_weights,
                                     coefficients);
}

GramLassoProblem to_gram(const LassoProblem& problem) {
  GramLassoProblem g;
  g.gram = problem.design.transpose() * problem.design;
  g.xty = problem.design.transpose() * problem.response;
  g.yty = problem.response.squaredNorm();
  g.penalty_weights = problem.penalty_weights;
  g.loss_scale = problem.loss_scale;
  return g;
}

LassoSolution solve_weighted_lasso(const LassoProblem& problem, const LassoOptions& options) {
  problem.validate();
  const Index m = problem.cols();
  const double two_scale = 2.0 * problem.loss_scale;

  LassoSolution sol;
  Vector beta = initial_point(options, m);
  Vector residual = problem.response - problem.design * beta;
  const Vector col_sq = problem.design.colwise().squaredNorm().transpose();

  for (Index i = 0; i < m; ++i) {
    if (col_sq(i) == 0.0) {
      if (beta(i) != 0.0) beta(i) = 0.0;
      if (problem.penalty_weights(i) == 0.0) {
        sol.warnings.push_back("column " + std::to_string(i) +
                               " is all zero and unpenalized; coefficient fixed at 0");
      }
    }
  }
  if (options.record_objective_trace) sol.objective_trace.push_back(lasso_objective(problem, beta));

  while (sol.iterations < options.max_iterations) {
    ++sol.iterations;
    double max_change = 0.0;
    for (Index i = 0; i < m; ++i) {
      if (col_sq(i) == 0.0) continue;
      const double old = beta(i);
      const double z = two_scale * (problem.design.col(i).dot(residual) + col_sq(i) * old);
      const double updated = soft_threshold(z, problem.penalty_weights(i)) / (two_scale * col_sq(i));
      if (!std::isfinite(updated)) throw NumericalError("non-finite coordinate update");
      const double delta = updated - old;
      if (delta != 0.0) {
        residual.noalias() -= delta * problem.design.col(i);
        beta(i) = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (options.record_objective_trace) {
      sol.objective_trace.push_back(lasso_objective(problem, beta));
    }
    if (max_change <= options.tolerance) {
      sol.converged = true;
      break;
    }
  }

  sol.coefficients = std::move(beta);
  sol.objective = lasso_objective(problem, sol.coefficients);
  sol.max_kkt_violation = kkt_residuals(problem, sol.coefficients).maxCoeff();
  if (!std::isfinite(sol.objective)) throw NumericalError("non-finite lasso objective");
  return sol;
}

LassoSolution solve_weighted_lasso(const GramLassoProblem& problem, const LassoOptions& options) {
  problem.validate();
  const Index m = problem.cols();
  const double two_scale = 2.0 * problem.loss_scale;

  LassoSolution sol;
  Vector beta = initial_point(options, m);
  for (Index i = 0; i < m; ++i) {
    if (problem.gram(i, i) <= 0.0) {
      beta(i) = 0.0;
      if (problem.penalty_weights(i) == 0.0) {
        sol.warnings.push_back("column " + std::to_string(i) +
                               " is all zero and unpenalized; coefficient fixed at 0");
      }
    }
  }
  Vector fitted_cov = problem.gram * beta;  // X'X b
  if (options.record_objective_trace) sol.objective_trace.push_back(lasso_objective(problem, beta));

  std::vector<Index> active;
  active.reserve(static_cast<std::size_t>(m));

  auto update = [&](Index i) -> double {
    const double gii = problem.gram(i, i);
    if (gii <= 0.0) return 0.0;
    const double old = beta(i);
    const double z = two_scale * (problem.xty(i) - fitted_cov(i) + gii * old);
    const double updated = soft_threshold(z, problem.penalty_weights(i)) / (two_scale * gii);
    if (!std::isfinite(updated)) throw NumericalError("non-finite coordinate update");
    const double delta = updated - old;
    if (delta != 0.0) {
      fitted_cov.noalias() += delta * problem.gram.col(i);
      beta(i) = updated;
    }
    return std::abs(delta);
  };

  while (sol.iterations < options.max_iterations) {
    // Full sweep over every coordinate; its max change is the convergence test.
    ++sol.iterations;
    double max_change = 0.0;
    for (Index i = 0; i < m; ++i) max_change = std::max(max_change, update(i));
    if (options.record_objective_trace) {
      sol.objective_trace.push_back(lasso_objective(problem, beta));
    }
    if (max_change <= options.tolerance) {
      sol.converged = true;
      break;
    }
    // Then cycle over the current support until it settles.
    active.clear();
    for (Index i = 0; i < m; ++i) {
      if (beta(i) != 0.0) active.push_back(i);
    }
    while (sol.iterations < options.max_iterations) {
      ++sol.iterations;
      double active_change = 0.0;
      for (const Index i : active) active_change = std::max(active_change, update(i));
      if (options.record_objective_trace) {
        sol.objective_trace.push_back(lasso_objective(problem, beta));
      }
      if (active_change <= options.tolerance) break;
    }
  }

  sol.coefficients = std::move(beta);
  sol.objective = lasso_objective(problem, sol.coefficients);
  sol.max_kkt_violation = kkt_residuals(problem, sol.coefficients).maxCoeff();
  if (!std::isfinite(sol.objective)) throw NumericalError("non-finite lasso objective");
  return sol;
}

LassoSolution brute_force_lasso_oracle(const LassoProblem& problem) {
  problem.validate();
  const Index m = problem.cols();
  if (m > kOracleMaxColumns) {
    throw CapacityError("brute-force oracle supports at most " +
                        std::to_string(kOracleMaxColumns) + " columns");
  }
  const double two_scale = 2.0 * problem.loss_scale;
  const Matrix gram = problem.design.transpose() * problem.design;
  const Vector xty = problem.design.transpose() * problem.response;
  const double grad_scale = 1.0 + two_scale * xty.cwiseAbs().maxCoeff() +
                            problem.penalty_weights.cwiseAbs().maxCoeff();
  const double feas_tol = 1e-9 * grad_scale;

  long patterns = 1;
  for (Index i = 0; i < m; ++i) patterns *= 3;

  LassoSolution best;
  best.objective = std::numeric_limits<double>::infinity();
  std::vector<int> signs(static_cast<std::size_t>(m), 0);

  for (long code = 0; code < patterns; ++code) {
    long c = code;
    std::vector<Index> active;
    for (Index i = 0; i < m; ++i) {
      signs[static_cast<std::size_t>(i)] = static_cast<int>(c % 3) - 1;
      c /= 3;
      if (signs[static_cast<std::size_t>(i)] != 0) active.push_back(i);
    }

    Vector beta = Vector::Zero(m);
    if (!active.empty()) {
      const auto a = static_cast<Index>(active.size());
      Matrix gaa(a, a);
      Vector rhs(a);
      for (Index r = 0; r < a; ++r) {
        const Index i = active[static_cast<std::size_t>(r)];
        for (Index s = 0; s < a; ++s) gaa(r, s) = gram(i, active[static_cast<std::size_t>(s)]);
        rhs(r) = xty(i) - problem.penalty_weights(i) * signs[static_cast<std::size_t>(i)] / two_scale;
      }
      const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(gaa);
      const Vector sub = cod.solve(rhs);
      if ((gaa * sub - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) continue;
      bool sign_ok = true;
      for (Index r = 0; r < a; ++r) {
        const Index i = active[static_cast<std::size_t>(r)];
        if (sub(r) * signs[static_cast<std::size_t>(i)] <= 0.0) {
          sign_ok = false;
          break;
        }
        beta(i) = sub(r);
      }
      if (!sign_ok) continue;
    }
    const Vector grad = -two_scale * (xty - gram * beta);
    bool zero_ok = true;
    for (Index i = 0; i < m && zero_ok; ++i) {
      if (signs[static_cast<std::size_t>(i)] == 0 &&
          std::abs(grad(i)) > problem.penalty_weights(i) + feas_tol) {
        zero_ok = false;
      }
    }
    if (!zero_ok) continue;
    const double obj = lasso_objective(problem, beta);
    if (obj < best.objective) {
      best.objective = obj;
      best.coefficients = beta;
    }
  }
  if (!std::isfinite(best.objective)) {
    throw NumericalError("brute-force oracle found no sign-consistent stationary point");
  }
  best.iterations = static_cast<int>(patterns);
  best.converged = true;
  best.max_kkt_violation = kkt_residuals(problem, best.coefficients).maxCoeff();
  return best;
}

}  // namespace glop
