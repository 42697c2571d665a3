#include <glop/dirty_model.hpp>
#include <glop/lasso.hpp>
#include <glop/model.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace glop {

Vector project_l1_ball(const Vector& v, double radius) {
  if (!(radius >= 0.0)) throw ArgumentError("radius must be >= 0");
  if (v.lpNorm<1>() <= radius) return v;
  if (radius == 0.0) return Vector::Zero(v.size());
  std::vector<double> mags(v.data(), v.data() + v.size());
  for (double& m : mags) m = std::abs(m);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (std::size_t i = 0; i < mags.size(); ++i) {
    cumulative += mags[i];
    const double candidate = (cumulative - radius) / static_cast<double>(i + 1);
    if (mags[i] > candidate) shift = candidate;
  }
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) out(i) = soft_threshold(v(i), shift);
  return out;
}

Vector prox_linf(const Vector& v, double tau) {
  if (!(tau >= 0.0)) throw ArgumentError("tau must be >= 0");
  return v - project_l1_ball(v, tau);
}

namespace {

struct PatientStats {
  Matrix gram;
  Vector xty;
  double yty = 0.0;
};

double row_max_sum(const Matrix& b) {
  double total = 0.0;
  for (Index j = 0; j < b.rows(); ++j) total += b.row(j).cwiseAbs().maxCoeff();
  return total;
}

double largest_eigenvalue(const Matrix& gram) {
  if (gram.rows() == 0) return 0.0;
  Vector v = Vector::Ones(gram.rows()) / std::sqrt(static_cast<double>(gram.rows()));
  double estimate = 0.0;
  for (int it = 0; it < 500; ++it) {
    Vector w = gram * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    const double next = v.dot(w);
    v = w / norm;
    if (std::abs(next - estimate) <= 1e-12 * std::abs(next)) return next;
    estimate = next;
  }
  // Power iteration may approach from below; the line search covers the rest.
  return estimate;
}

class DirtyProblem {
 public:
  DirtyProblem(const MultiTaskDataset& dataset, double lambda_b, double lambda_s)
      : lambda_b_(lambda_b), lambda_s_(lambda_s) {
    for (const auto& block : dataset.blocks()) {
      stats_.push_back({block.design.transpose() * block.design,
                        block.design.transpose() * block.targets, block.targets.squaredNorm()});
    }
  }

  double smooth(const Matrix& b, const Matrix& s) const {
    double total = 0.0;
    for (std::size_t k = 0; k < stats_.size(); ++k) {
      const auto col = static_cast<Index>(k);
      const Vector beta = b.col(col) + s.col(col);
      total += stats_[k].yty - 2.0 * beta.dot(stats_[k].xty) + beta.dot(stats_[k].gram * beta);
    }
    return std::max(total, 0.0);
  }

  /// The gradient with respect to B and to S is the same matrix.
  Matrix gradient(const Matrix& b, const Matrix& s) const {
    Matrix grad(b.rows(), b.cols());
    for (std::size_t k = 0; k < stats_.size(); ++k) {
      const auto col = static_cast<Index>(k);
      grad.col(col) = 2.0 * (stats_[k].gram * (b.col(col) + s.col(col)) - stats_[k].xty);
    }
    return grad;
  }

  double penalty(const Matrix& b, const Matrix& s) const {
    return lambda_b_ * row_max_sum(b) + lambda_s_ * s.cwiseAbs().sum();
  }

  double lipschitz() const {
    double top = 0.0;
    for (const auto& st : stats_) top = std::max(top, largest_eigenvalue(st.gram));
    return 4.0 * top;
  }

  void prox(Matrix& b, Matrix& s, double step) const {
    for (Index j = 0; j < b.rows(); ++j) b.row(j) = prox_linf(b.row(j).transpose(), step * lambda_b_);
    s = s.unaryExpr([&](double v) { return soft_threshold(v, step * lambda_s_); });
  }

 private:
  std::vector<PatientStats> stats_;
  double lambda_b_;
  double lambda_s_;
};

}  // namespace

double dirty_objective(const MultiTaskDataset& dataset, const Matrix& b, const Matrix& s,
                       double lambda_b, double lambda_s) {
  double loss = 0.0;
  for (std::size_t k = 0; k < dataset.num_patients(); ++k) {
    const PatientBlock& block = dataset.block(k);
    const auto col = static_cast<Index>(k);
    loss += (block.targets - block.design * (b.col(col) + s.col(col))).squaredNorm();
  }
  return loss + lambda_b * row_max_sum(b) + lambda_s * s.cwiseAbs().sum();
}

DirtyModel solve_dirty_model(const MultiTaskDataset& dataset, double lambda_b, double lambda_s,
                             const DirtyModelOptions& options) {
  if (!(lambda_b >= 0.0) || !(lambda_s >= 0.0) || !std::isfinite(lambda_b) ||
      !std::isfinite(lambda_s)) {
    throw ArgumentError("lambda_b and lambda_s must be finite and >= 0");
  }
  const Index p = dataset.num_features();
  const auto kappa = static_cast<Index>(dataset.num_patients());
  const DirtyProblem problem(dataset, lambda_b, lambda_s);

  Matrix b = options.init_b.value_or(Matrix::Zero(p, kappa));
  Matrix s = options.init_s.value_or(Matrix::Zero(p, kappa));
  if (b.rows() != p || b.cols() != kappa || s.rows() != p || s.cols() != kappa) {
    throw ArgumentError("initial B and S must be p x kappa");
  }

  const double lip = problem.lipschitz();
  double step = lip > 0.0 ? 1.0 / lip : 1.0;
  double current = problem.smooth(b, s) + problem.penalty(b, s);

  DirtyModel out;
  if (options.record_objective_trace) out.objective_trace.push_back(current);

  // Extrapolation point and momentum state.
  Matrix zb = b, zs = s;
  Matrix prev_b = b, prev_s = s;
  double theta = 1.0;
  bool plain = true;

  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const double fz = problem.smooth(zb, zs);
    const Matrix grad = problem.gradient(zb, zs);
    Matrix ub, us;
    double fu = 0.0;
    while (true) {
      ub = zb - step * grad;
      us = zs - step * grad;
      problem.prox(ub, us, step);
      const Matrix db = ub - zb;
      const Matrix ds = us - zs;
      fu = problem.smooth(ub, us);
      const double model_value = fz + grad.cwiseProduct(db + ds).sum() +
                                 (db.squaredNorm() + ds.squaredNorm()) / (2.0 * step);
      if (fu <= model_value + 1e-12 * std::max(1.0, std::abs(fz)) || step < 1e-300) break;
      step *= 0.5;
    }
    const double candidate = fu + problem.penalty(ub, us);
    const bool accept = candidate <= current;
    const double previous = current;
    prev_b = b;
    prev_s = s;
    if (accept) {
      b = std::move(ub);
      s = std::move(us);
      current = candidate;
    }
    if (options.record_objective_trace) out.objective_trace.push_back(current);

    const double decrease = (previous - current) / std::max(std::abs(previous), 1e-300);
    if (plain && decrease <= options.tolerance) {
      out.converged = true;
      ++it;
      break;
    }
    if (options.accelerated && accept && decrease > options.tolerance) {
      const double next_theta = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
      const double momentum = (theta - 1.0) / next_theta;
      zb = b + momentum * (b - prev_b);
      zs = s + momentum * (s - prev_s);
      theta = next_theta;
      plain = momentum == 0.0;
    } else {
      zb = b;
      zs = s;
      theta = 1.0;
      plain = true;
    }
  }

  out.b = std::move(b);
  out.s = std::move(s);
  out.lambda_b = lambda_b;
  out.lambda_s = lambda_s;
  out.iterations = it;
  out.objective = dirty_objective(dataset, out.b, out.s, lambda_b, lambda_s);
  out.feature_names = dataset.feature_names();
  out.patient_ids = dataset.patient_ids();
  return out;
}

double evaluate_mse(const DirtyModel& model, const MultiTaskDataset& testset) {
  if (static_cast<Index>(testset.num_patients()) != model.b.cols() ||
      testset.num_features() != model.b.rows()) {
    throw ArgumentError("testset shape does not match the dirty model");
  }
  double sse = 0.0;
  for (std::size_t k = 0; k < testset.num_patients(); ++k) {
    const PatientBlock& block = testset.block(k);
    if (!model.patient_ids.empty() && model.patient_ids[k] != block.patient_id) {
      throw ArgumentError("testset patient '" + block.patient_id + "' does not match model");
    }
    sse += (block.targets - block.design * model.patient_coefficients(static_cast<Index>(k)))
               .squaredNorm();
  }
  return sse / static_cast<double>(testset.total_rows());
}

}  // namespace glop
