#include <glop/lars.hpp>
#include <glop/lasso.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace glop {

std::string to_string(PathEvent::Kind kind) {
  switch (kind) {
    case PathEvent::Kind::start:
      return "start";
    case PathEvent::Kind::enter:
      return "enter";
    case PathEvent::Kind::drop:
      return "drop";
    case PathEvent::Kind::end:
      return "end";
  }
  return "unknown";
}

namespace {

Matrix gather_columns(const Matrix& x, const std::vector<Index>& cols) {
  Matrix out(x.rows(), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Index>(c)) = x.col(cols[c]);
  return out;
}

bool full_column_rank(const Matrix& xa, double rank_tolerance) {
  if (xa.cols() == 0) return true;
  if (xa.cols() > xa.rows()) return false;
  const Eigen::JacobiSVD<Matrix> svd(xa);
  const Vector& sv = svd.singularValues();
  return sv(sv.size() - 1) > rank_tolerance * sv(0);
}

}  // namespace

RegularizationPath lars_lasso_path(const Matrix& design, const Vector& response,
                                   const LarsOptions& options) {
  if (design.rows() != response.size()) throw ArgumentError("response length must equal rows");
  if (!design.allFinite() || !response.allFinite()) throw ArgumentError("non-finite input");
  if (!(options.loss_scale > 0.0)) throw ArgumentError("loss_scale must be positive");
  if (options.max_knots < 1) throw ArgumentError("max_knots must be >= 1");
  if ((design.colwise().squaredNorm().array() == 0.0).all()) {
    throw ArgumentError("design has no nonzero column");
  }

  const Index m = design.cols();
  const double two_s = 2.0 * options.loss_scale;

  RegularizationPath path;
  path.loss_scale = options.loss_scale;

  Vector beta = Vector::Zero(m);
  Vector corr = two_s * (design.transpose() * response);
  Index first = 0;
  const double lambda_max = corr.cwiseAbs().maxCoeff(&first);
  path.lambda_max = lambda_max;
  const double lambda_min = options.min_lambda_ratio * lambda_max;

  auto record_knot = [&](double lambda, std::vector<PathEvent> events) {
    LassoProblem at;
    at.design = design;
    at.response = response;
    at.penalty_weights = Vector::Constant(m, lambda);
    at.loss_scale = options.loss_scale;
    path.knots.push_back(lambda);
    path.coefficients.push_back(beta);
    path.events.push_back(std::move(events));
    path.knot_kkt_violation.push_back(kkt_residuals(at, beta).maxCoeff());
  };

  if (lambda_max == 0.0) {
    record_knot(0.0, {{PathEvent::Kind::start, -1}});
    path.reached_zero = true;
    path.verified_pointwise = true;
    path.stop_reason = "response orthogonal to every column";
    return path;
  }

  std::vector<Index> tied;
  for (Index j = 0; j < m; ++j) {
    if (j != first && std::abs(corr(j)) >= lambda_max * (1.0 - options.tie_tolerance)) {
      tied.push_back(j);
    }
  }
  if (!tied.empty()) {
    tied.insert(tied.begin(), first);
    std::string names;
    for (Index j : tied) names += (names.empty() ? "" : ", ") + std::to_string(j);
    throw TieError("columns " + names + " tie for entry at lambda_max", tied);
  }

  std::vector<Index> active{first};
  std::vector<double> signs{corr(first) > 0 ? 1.0 : -1.0};
  std::vector<bool> is_active(static_cast<std::size_t>(m), false);
  is_active[static_cast<std::size_t>(first)] = true;
  Index just_dropped = -1;

  double lambda = lambda_max;
  record_knot(lambda, {{PathEvent::Kind::start, -1}, {PathEvent::Kind::enter, first}});

  while (true) {
    if (static_cast<int>(path.knots.size()) >= options.max_knots) {
      path.stop_reason = "max_knots reached";
      break;
    }
    const Matrix xa = gather_columns(design, active);
    if (!full_column_rank(xa, options.rank_tolerance)) {
      path.truncated = true;
      path.stop_reason = "active design is rank deficient";
      break;
    }
    const Matrix gram_a = xa.transpose() * xa;
    const Eigen::LDLT<Matrix> ldlt(gram_a);
    const auto na = static_cast<Index>(active.size());
    Vector s(na);
    for (Index i = 0; i < na; ++i) s(i) = signs[static_cast<std::size_t>(i)];
    const Vector w = ldlt.solve(s) / two_s;
    const Vector xaty = xa.transpose() * response;
    const Vector a = two_s * (design.transpose() * (xa * w));

    const double step_floor = 1e-14 * lambda_max;
    double best_entry = std::numeric_limits<double>::infinity();
    double second_entry = std::numeric_limits<double>::infinity();
    Index entering = -1;
    Index runner_up = -1;
    for (Index j = 0; j < m; ++j) {
      if (is_active[static_cast<std::size_t>(j)] || j == just_dropped) continue;
      double step = std::numeric_limits<double>::infinity();
      if (1.0 - a(j) > 0.0) {
        const double d = (lambda - corr(j)) / (1.0 - a(j));
        if (d > step_floor) step = std::min(step, d);
      }
      if (1.0 + a(j) > 0.0) {
        const double d = (lambda + corr(j)) / (1.0 + a(j));
        if (d > step_floor) step = std::min(step, d);
      }
      if (step < best_entry) {
        second_entry = best_entry;
        runner_up = entering;
        best_entry = step;
        entering = j;
      } else if (step < second_entry) {
        second_entry = step;
        runner_up = j;
      }
    }

    double best_drop = std::numeric_limits<double>::infinity();
    Index dropping = -1;
    for (Index i = 0; i < na; ++i) {
      const Index col = active[static_cast<std::size_t>(i)];
      if (w(i) == 0.0) continue;
      const double d = -beta(col) / w(i);
      if (d > step_floor && d < best_drop) {
        best_drop = d;
        dropping = i;
      }
    }

    // Events within rounding of the end of the path are the end itself; with more
    // columns than rows every inactive correlation reaches zero together there.
    const double to_end = lambda - lambda_min;
    const double end_band = options.tie_tolerance * lambda_max;
    if (best_entry >= to_end - end_band) best_entry = std::numeric_limits<double>::infinity();
    if (best_drop >= to_end - end_band) best_drop = std::numeric_limits<double>::infinity();
    const double step = std::min({best_entry, best_drop, to_end});
    if (!(step > 0.0) || !std::isfinite(step)) {
      path.stop_reason = "no admissible step";
      break;
    }
    if (step == best_entry && entering >= 0 && runner_up >= 0 &&
        second_entry - best_entry <= options.tie_tolerance * lambda) {
      throw TieError("columns " + std::to_string(entering) + " and " + std::to_string(runner_up) +
                         " tie for entry at lambda " + std::to_string(lambda - step),
                     {entering, runner_up});
    }

    // Advance along the segment, then resolve the active coefficients exactly.
    const double next_lambda = step == to_end ? lambda_min : lambda - step;
    const Vector beta_a = ldlt.solve(xaty - next_lambda * s / two_s);
    for (Index i = 0; i < na; ++i) beta(active[static_cast<std::size_t>(i)]) = beta_a(i);
    lambda = next_lambda;

    std::vector<PathEvent> events;
    just_dropped = -1;
    if (step == to_end) {
      events.push_back({PathEvent::Kind::end, -1});
    } else if (step == best_drop) {
      const Index col = active[static_cast<std::size_t>(dropping)];
      beta(col) = 0.0;
      is_active[static_cast<std::size_t>(col)] = false;
      active.erase(active.begin() + dropping);
      signs.erase(signs.begin() + dropping);
      just_dropped = col;
      events.push_back({PathEvent::Kind::drop, col});
    } else {
      active.push_back(entering);
      is_active[static_cast<std::size_t>(entering)] = true;
      events.push_back({PathEvent::Kind::enter, entering});
    }
    corr = two_s * (design.transpose() * (response - design * beta));
    if (!events.empty() && events.back().kind == PathEvent::Kind::enter) {
      signs.push_back(corr(entering) > 0 ? 1.0 : -1.0);
    }
    record_knot(lambda, std::move(events));

    if (step == to_end) {
      path.reached_zero = lambda_min == 0.0;
      path.stop_reason = lambda_min == 0.0 ? "reached lambda = 0" : "reached min_lambda";
      break;
    }
  }
  path.verified_pointwise = true;
  return path;
}

Vector path_eval(const RegularizationPath& path, double lambda) {
  if (path.knots.empty()) throw RangeError("empty path");
  if (!(lambda >= 0.0)) throw ArgumentError("lambda must be >= 0");
  if (lambda >= path.knots.front()) return Vector::Zero(path.coefficients.front().size());
  if (lambda < path.knots.back()) {
    throw RangeError("lambda " + std::to_string(lambda) + " is below the last computed knot " +
                     std::to_string(path.knots.back()) +
                     (path.truncated ? " (path truncated: " + path.stop_reason + ")" : ""));
  }
  // knots are strictly decreasing; find i with knots[i] >= lambda > knots[i+1].
  const auto it = std::lower_bound(path.knots.begin(), path.knots.end(), lambda,
                                   [](double knot, double value) { return knot > value; });
  const auto i = static_cast<std::size_t>(it - path.knots.begin());
  if (i < path.knots.size() && path.knots[i] == lambda) return path.coefficients[i];
  const std::size_t hi = i - 1;  // knots[hi] > lambda > knots[i]
  const double t = (path.knots[hi] - lambda) / (path.knots[hi] - path.knots[i]);
  return (1.0 - t) * path.coefficients[hi] + t * path.coefficients[i];
}

GlopPath::GlopPath(StackedDesign design, RegularizationPath path, LossScaling scaling)
    : design_(std::move(design)), path_(std::move(path)), scaling_(scaling) {}

GlopModel GlopPath::model_at(double lambda) const {
  const Vector xi = path_eval(path_, lambda);
  auto [g, l] = unstack_coefficients(design_, xi);
  GlopModel model;
  model.global = std::move(g);
  model.local = std::move(l);
  model.penalty.lambda_g = lambda * design_.reference_lambda_g;
  model.penalty.lambda_l = lambda * design_.reference_lambda_l;
  model.penalty.loss_scaling = scaling_;
  model.penalty.global_feature_weights = design_.global_feature_weights;
  model.feature_names = design_.feature_names;
  model.patient_ids = design_.patient_ids;
  model.converged = true;
  model.objective = path_.loss_scale * (design_.response - design_.matrix * xi).squaredNorm() +
                    lambda * xi.lpNorm<1>();
  return model;
}

GlopPath glop_path(const MultiTaskDataset& dataset, double reference_lambda_g,
                   double reference_lambda_l, const GlopPathOptions& options) {
  StackedDesign design = build_stacked_design(dataset, reference_lambda_g, reference_lambda_l,
                                              options.global_feature_weights);
  LarsOptions lars = options.lars;
  lars.loss_scale = stacked_loss_scale(design, options.loss_scaling);
  RegularizationPath path = lars_lasso_path(design.matrix, design.response, lars);
  return GlopPath(std::move(design), std::move(path), options.loss_scaling);
}

}  // namespace glop
