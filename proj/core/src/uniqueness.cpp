#include <glop/uniqueness.hpp>

#include <glop/bcm.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace glop {

std::string to_string(UniquenessVerdict verdict) {
  switch (verdict) {
    case UniquenessVerdict::unique_by_theorem1:
      return "unique_by_theorem1";
    case UniquenessVerdict::unique_by_active_rank:
      return "unique_by_active_rank";
    case UniquenessVerdict::inconclusive:
      return "inconclusive";
    case UniquenessVerdict::not_ain_witness_found:
      return "not_ain_witness_found";
  }
  return "inconclusive";
}

UniquenessVerdict uniqueness_verdict_from_string(const std::string& name) {
  for (auto v : {UniquenessVerdict::unique_by_theorem1, UniquenessVerdict::unique_by_active_rank,
                 UniquenessVerdict::inconclusive, UniquenessVerdict::not_ain_witness_found}) {
    if (to_string(v) == name) return v;
  }
  throw ArgumentError("unknown uniqueness verdict '" + name + "'");
}

EquicorrelationSet equicorrelation_set(const LassoProblem& problem, const Vector& solution,
                                       double tolerance) {
  problem.validate();
  if (solution.size() != problem.cols()) throw ArgumentError("solution length must equal columns");
  if (!(tolerance >= 0.0)) throw ArgumentError("tolerance must be >= 0");
  const double violation = problem.cols() ? kkt_residuals(problem, solution).maxCoeff() : 0.0;
  if (violation > tolerance) {
    std::ostringstream msg;
    msg << "solution is not optimal: max KKT violation " << violation << " exceeds tolerance "
        << tolerance;
    throw PreconditionError(msg.str());
  }

  const Vector grad = loss_gradient(problem, solution);
  EquicorrelationSet set;
  set.subgradient = Vector::Zero(problem.cols());
  for (Index i = 0; i < problem.cols(); ++i) {
    const double lambda = problem.penalty_weights(i);
    double alpha = 0.0;
    bool member = false;
    if (lambda == 0.0) {
      alpha = solution(i) < 0.0 ? -1.0 : 1.0;
      member = true;
    } else {
      alpha = -grad(i) / lambda;
      member = solution(i) != 0.0 || std::abs(grad(i)) >= lambda - tolerance;
    }
    set.subgradient(i) = alpha;
    if (member) {
      set.indices.push_back(i);
      set.subgradient_signs.push_back(alpha);
    }
  }
  return set;
}

namespace {

Matrix gather(const Matrix& x, const std::vector<Index>& cols) {
  Matrix out(x.rows(), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Index>(c)) = x.col(cols[c]);
  return out;
}

}  // namespace

RankVerdict active_rank_check(const Matrix& design, const EquicorrelationSet& set,
                              double rank_tolerance) {
  for (Index i : set.indices) {
    if (i < 0 || i >= design.cols()) throw ArgumentError("equicorrelation index out of range");
  }
  RankVerdict verdict;
  verdict.columns = static_cast<Index>(set.indices.size());
  if (set.indices.empty()) {
    verdict.null_space = Matrix(0, 0);
    return verdict;
  }
  const Matrix xa = gather(design, set.indices);
  const Eigen::JacobiSVD<Matrix> svd(xa, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  verdict.sigma_max = sv.size() ? sv(0) : 0.0;
  // Columns beyond the row count contribute implicit zero singular values.
  verdict.sigma_min = xa.cols() > xa.rows() || sv.size() == 0 ? 0.0 : sv(sv.size() - 1);
  const double cut = rank_tolerance * verdict.sigma_max;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) ++rank;
  }
  verdict.rank = rank;
  verdict.full_rank = rank == xa.cols();
  verdict.null_space = svd.matrixV().rightCols(xa.cols() - rank);
  return verdict;
}

std::optional<NullSpaceDirection> null_space_direction(const LassoProblem& problem,
                                                       const EquicorrelationSet& set,
                                                       const Vector& solution) {
  const RankVerdict rank = active_rank_check(problem.design, set);
  if (rank.full_rank) return std::nullopt;

  const Vector z_a = rank.null_space.col(0);
  auto step_limit = [&](double direction_sign) {
    double limit = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < set.indices.size(); ++c) {
      const Index i = set.indices[c];
      if (problem.penalty_weights(i) == 0.0) continue;
      const double alpha = set.subgradient(i) >= 0.0 ? 1.0 : -1.0;
      const double rate = direction_sign * z_a(static_cast<Index>(c)) * alpha;
      if (rate < 0.0) limit = std::min(limit, solution(i) * alpha / -rate);
    }
    return std::max(limit, 0.0);
  };
  const double forward = step_limit(1.0);
  const double backward = step_limit(-1.0);
  const double sign = forward >= backward ? 1.0 : -1.0;

  NullSpaceDirection out;
  out.direction = Vector::Zero(problem.cols());
  for (std::size_t c = 0; c < set.indices.size(); ++c) {
    out.direction(set.indices[c]) = sign * z_a(static_cast<Index>(c));
  }
  out.max_step = std::max(forward, backward);
  return out;
}

WitnessError witness_error(const Matrix& matrix, const AinWitness& witness) {
  if (witness.column < 0 || witness.column >= matrix.cols()) {
    throw ArgumentError("witness column out of range");
  }
  Vector combo = Vector::Zero(matrix.rows());
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < witness.others.size(); ++i) {
    combo += witness.weights[i] * witness.signs[i] * matrix.col(witness.others[i]);
    weight_sum += witness.weights[i];
  }
  WitnessError err;
  err.reconstruction =
      matrix.rows() ? (matrix.col(witness.column) - combo).cwiseAbs().maxCoeff() : 0.0;
  err.weight_sum = std::abs(weight_sum - 1.0);
  return err;
}

namespace {

// Search for a witness expressing column j through the others.
//
// Writing c_i = w_i s_i, a witness is any c with X_{-j} c = X_j and sum_i s_i c_i = 1.
// With a nontrivial null space one free direction always reaches the affine
// constraint; otherwise c is unique and only the 2^(m-1) sign patterns remain.
std::optional<AinWitness> witness_for_column(const Matrix& x, Index j, double tolerance) {
  const Index m = x.cols();
  if (m < 2) return std::nullopt;
  std::vector<Index> others;
  for (Index i = 0; i < m; ++i) {
    if (i != j) others.push_back(i);
  }
  const Matrix xo = gather(x, others);
  const Vector target = x.col(j);
  const Eigen::JacobiSVD<Matrix> svd(xo, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double cut = kRankTolerance * (sv.size() ? sv(0) : 0.0);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) ++rank;
  }
  const auto k = static_cast<Index>(others.size());
  Vector c0 = Vector::Zero(k);
  if (rank > 0) {
    const Vector coeff =
        (svd.matrixU().leftCols(rank).transpose() * target).cwiseQuotient(sv.head(rank));
    c0 = svd.matrixV().leftCols(rank) * coeff;
  }
  const double residual = (xo * c0 - target).norm();
  if (residual > tolerance * (1.0 + target.norm())) return std::nullopt;

  AinWitness witness;
  witness.column = j;
  witness.others = others;
  witness.signs.assign(static_cast<std::size_t>(k), 1);
  witness.weights.assign(static_cast<std::size_t>(k), 0.0);

  if (rank < k) {
    const Vector n1 = svd.matrixV().col(rank);
    Vector s(k);
    for (Index i = 0; i < k; ++i) s(i) = n1(i) < 0.0 ? -1.0 : 1.0;
    const double t = (1.0 - s.dot(c0)) / s.dot(n1);
    const Vector c = c0 + t * n1;
    for (Index i = 0; i < k; ++i) {
      witness.signs[static_cast<std::size_t>(i)] = static_cast<int>(s(i));
      witness.weights[static_cast<std::size_t>(i)] = s(i) * c(i);
    }
    return witness;
  }

  // Bit i of the pattern set means s_i = -1.
  const std::uint64_t patterns = std::uint64_t{1} << k;
  for (std::uint64_t pattern = 0; pattern < patterns; ++pattern) {
    double sum = 0.0;
    for (Index i = 0; i < k; ++i) sum += ((pattern >> i) & 1U) ? -c0(i) : c0(i);
    if (std::abs(sum - 1.0) <= tolerance) {
      for (Index i = 0; i < k; ++i) {
        const int s = ((pattern >> i) & 1U) ? -1 : 1;
        witness.signs[static_cast<std::size_t>(i)] = s;
        witness.weights[static_cast<std::size_t>(i)] = s * c0(i);
      }
      return witness;
    }
  }
  return std::nullopt;
}

}  // namespace

UniquenessCertificate check_ain_bruteforce(const Matrix& matrix, double tolerance) {
  if (matrix.cols() > kAinMaxColumns) {
    throw CapacityError("brute-force AIN check supports at most " +
                        std::to_string(kAinMaxColumns) + " columns, got " +
                        std::to_string(matrix.cols()) +
                        "; use theorem1_certificate for larger designs");
  }
  if (!matrix.allFinite()) throw ArgumentError("matrix has non-finite entries");
  if (!(tolerance > 0.0)) throw ArgumentError("tolerance must be positive");

  UniquenessCertificate cert;
  for (Index j = 0; j < matrix.cols(); ++j) {
    if (auto w = witness_for_column(matrix, j, tolerance)) {
      cert.verdict = UniquenessVerdict::not_ain_witness_found;
      cert.details.push_back("column " + std::to_string(j) +
                             " is a signed affine combination of the other columns");
      cert.witness = std::move(w);
      return cert;
    }
  }
  cert.verdict = UniquenessVerdict::unique_by_active_rank;
  cert.details.push_back("columns are AIN (exhaustive search over " +
                         std::to_string(matrix.cols()) + " columns)");
  return cert;
}

namespace {

bool all_values_distinct(const Matrix& x) {
  for (Index j = 0; j < x.cols(); ++j) {
    std::set<double> seen(x.col(j).data(), x.col(j).data() + x.rows());
    if (static_cast<Index>(seen.size()) != x.rows()) return false;
  }
  return true;
}

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

UniquenessCertificate theorem1_certificate(const MultiTaskDataset& dataset,
                                           const GlopPenalty& penalty,
                                           const Theorem1Options& options) {
  UniquenessCertificate cert;
  const Index p = dataset.num_features();
  const auto kappa = static_cast<Index>(dataset.num_patients());

  if (!(penalty.lambda_g > 0.0) || !(penalty.lambda_l > 0.0)) {
    cert.details.push_back("requires lambda_g > 0 and lambda_l > 0");
    return cert;
  }

  // Each global column relates to its local columns with ratio lambda_L / (lambda_g w_j).
  double smallest_ratio = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < p; ++j) {
    const double w = penalty.global_weight(j);
    if (w == 0.0) {
      cert.details.push_back("global coefficient '" +
                             dataset.feature_names()[static_cast<std::size_t>(j)] +
                             "' is unpenalized; the penalty condition does not apply");
      smallest_ratio = 0.0;
      break;
    }
    smallest_ratio = std::min(smallest_ratio, penalty.lambda_l / (penalty.lambda_g * w));
  }
  if (smallest_ratio > 1.0) {
    cert.penalty_condition_met = true;
    cert.details.push_back("lambda_L > lambda_g holds (ratio " + fmt(smallest_ratio) + ")");
  } else if (kappa % 2 == 0 && smallest_ratio > 0.5) {
    cert.penalty_condition_met = true;
    cert.even_kappa_refinement_used = true;
    cert.details.push_back("kappa = " + std::to_string(kappa) +
                           " is even and lambda_L / lambda_g = " + fmt(smallest_ratio) +
                           " > 1/2");
  } else if (smallest_ratio > 0.0) {
    cert.details.push_back("penalty condition fails: lambda_L / lambda_g = " +
                           fmt(smallest_ratio) + " is not > 1" +
                           (kappa % 2 == 0 ? " nor > 1/2 with even kappa"
                                           : " and kappa = " + std::to_string(kappa) + " is odd"));
  }

  bool blocks_ok = true;
  const bool brute = options.per_patient_ain == PerPatientAin::brute_force && p <= kAinMaxColumns;
  if (brute) {
    cert.per_patient_ain_checked = true;
    for (Index k = 0; k < kappa; ++k) {
      const Matrix& x = dataset.block(static_cast<std::size_t>(k)).design;
      UniquenessCertificate block = check_ain_bruteforce(x, options.tolerance);
      if (block.witness) {
        blocks_ok = false;
        cert.failing_patient = k;
        cert.witness = std::move(block.witness);
        cert.details.push_back("patient '" + dataset.patient_ids()[static_cast<std::size_t>(k)] +
                               "' design is not AIN (witness found)");
        break;
      }
    }
    if (blocks_ok) cert.details.push_back("per-patient AIN verified by brute force");
  } else {
    for (Index k = 0; k < kappa; ++k) {
      if (!all_values_distinct(dataset.block(static_cast<std::size_t>(k)).design)) {
        blocks_ok = false;
        cert.failing_patient = k;
        cert.details.push_back(
            "patient '" + dataset.patient_ids()[static_cast<std::size_t>(k)] +
            "' has a discrete-valued column; AIN cannot be assumed" +
            (p > kAinMaxColumns ? " and p is too large for the brute-force check" : ""));
        break;
      }
    }
    if (blocks_ok) {
      cert.details.push_back(
          "per-patient AIN assumed: continuous-valued designs are AIN with probability one");
    }
  }

  if (blocks_ok && cert.penalty_condition_met) cert.verdict = UniquenessVerdict::unique_by_theorem1;
  return cert;
}

namespace {

// The gLOP objective as one lasso over [g, L_1..L_K] with raw (unscaled) columns.
// Row blocks carry sqrt(scale_k) so unequal patient sizes fit the same form.
LassoProblem raw_stacked_problem(const MultiTaskDataset& dataset, const GlopPenalty& penalty) {
  const Index p = dataset.num_features();
  const auto kappa = static_cast<Index>(dataset.num_patients());
  LassoProblem prob;
  prob.design = Matrix::Zero(dataset.total_rows(), p * (kappa + 1));
  prob.response.resize(dataset.total_rows());
  prob.loss_scale = 1.0;
  Index row = 0;
  for (Index k = 0; k < kappa; ++k) {
    const PatientBlock& b = dataset.block(static_cast<std::size_t>(k));
    const double root = std::sqrt(penalty.loss_scale(b.rows()));
    prob.design.block(row, 0, b.rows(), p) = root * b.design;
    prob.design.block(row, p * (k + 1), b.rows(), p) = root * b.design;
    prob.response.segment(row, b.rows()) = root * b.targets;
    row += b.rows();
  }
  prob.penalty_weights.resize(p * (kappa + 1));
  for (Index j = 0; j < p; ++j) prob.penalty_weights(j) = penalty.lambda_g * penalty.global_weight(j);
  prob.penalty_weights.tail(p * kappa).setConstant(penalty.lambda_l);
  return prob;
}

}  // namespace

UniquenessCertificate certify_model(const MultiTaskDataset& dataset, const GlopModel& model,
                                    const Theorem1Options& options) {
  UniquenessCertificate cert = theorem1_certificate(dataset, model.penalty, options);
  if (cert.verdict == UniquenessVerdict::unique_by_theorem1) return cert;

  const LassoProblem prob = raw_stacked_problem(dataset, model.penalty);
  const Index p = dataset.num_features();
  Vector xi(prob.cols());
  xi.head(p) = model.global;
  xi.tail(prob.cols() - p) = model.local.reshaped();
  const double violation = kkt_residuals(prob, xi).maxCoeff();
  const double scale = std::max(1.0, glop_zero_gradient_scale(dataset, model.penalty));
  const double tolerance = std::max(1e-7 * scale, 2.0 * violation);
  const EquicorrelationSet set = equicorrelation_set(prob, xi, tolerance);
  const RankVerdict rank = active_rank_check(prob.design, set);
  if (rank.full_rank) {
    cert.verdict = UniquenessVerdict::unique_by_active_rank;
    cert.details.push_back("equicorrelation set of size " + std::to_string(rank.columns) +
                           " has full column rank");
  } else {
    cert.details.push_back("equicorrelation set of size " + std::to_string(rank.columns) +
                           " has rank " + std::to_string(rank.rank) +
                           "; the fit is unique but coefficients may not be");
  }
  return cert;
}

}  // namespace glop
