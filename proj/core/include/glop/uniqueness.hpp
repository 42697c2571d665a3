#pragma once

#include <glop/dataset.hpp>
#include <glop/lasso.hpp>
#include <glop/model.hpp>

#include <optional>
#include <string>
#include <vector>

namespace glop {

/// Indices whose subgradient sits on the boundary (|alpha_i| = 1) at an optimum,
/// with the implied subgradient values.
struct EquicorrelationSet {
  std::vector<Index> indices;
  std::vector<double> subgradient_signs;  ///< alpha_i for i in indices
  Vector subgradient;                     ///< alpha_i for every coordinate
};

/// alpha_i = -grad_i / lambda_i. Unpenalized coordinates (lambda_i = 0) are always members.
/// Throws PreconditionError when the solution violates optimality by more than tolerance.
EquicorrelationSet equicorrelation_set(const LassoProblem& problem, const Vector& solution,
                                       double tolerance);

struct RankVerdict {
  bool full_rank = true;
  Index rank = 0;
  Index columns = 0;
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  /// Orthonormal basis of null(X_A), expressed in the coordinates of X_A's columns.
  Matrix null_space;
};

inline constexpr double kRankTolerance = 1e-10;

/// Numerical column rank of the sub-matrix formed by the set's columns.
RankVerdict active_rank_check(const Matrix& design, const EquicorrelationSet& set,
                              double rank_tolerance = kRankTolerance);

/// Direction z (full length, zero off the set) in null(X_A), and the largest step t
/// for which solution + t z keeps every penalized coordinate's sign consistent with
/// its subgradient. Such moves leave the objective unchanged. Empty when X_A has
/// full column rank.
struct NullSpaceDirection {
  Vector direction;
  double max_step = 0.0;
};
std::optional<NullSpaceDirection> null_space_direction(const LassoProblem& problem,
                                                       const EquicorrelationSet& set,
                                                       const Vector& solution);

enum class UniquenessVerdict {
  unique_by_theorem1,
  unique_by_active_rank,
  inconclusive,
  not_ain_witness_found,
};

std::string to_string(UniquenessVerdict verdict);
UniquenessVerdict uniqueness_verdict_from_string(const std::string& name);

/// Column `column` equals sum_i weights[i] * signs[i] * X_{others[i]} with sum(weights) = 1.
struct AinWitness {
  Index column = -1;
  std::vector<Index> others;
  std::vector<int> signs;
  std::vector<double> weights;
};

struct UniquenessCertificate {
  UniquenessVerdict verdict = UniquenessVerdict::inconclusive;
  std::optional<AinWitness> witness;
  std::vector<std::string> details;
  bool penalty_condition_met = false;
  bool even_kappa_refinement_used = false;
  bool per_patient_ain_checked = false;  ///< false means assumed from continuity
  std::optional<Index> failing_patient;
};

/// Maximum reconstruction error and weight-sum error of a witness.
struct WitnessError {
  double reconstruction = 0.0;
  double weight_sum = 0.0;
};
WitnessError witness_error(const Matrix& matrix, const AinWitness& witness);

inline constexpr Index kAinMaxColumns = 16;

/// Exhaustive affine-independence-with-negation test over every column and sign pattern.
/// A witness gives not_ain_witness_found. Without one the columns are AIN, so every
/// equicorrelation sub-matrix has full rank and the verdict is unique_by_active_rank.
/// Throws CapacityError above kAinMaxColumns columns.
UniquenessCertificate check_ain_bruteforce(const Matrix& matrix, double tolerance = 1e-10);
inline bool ain_holds(const UniquenessCertificate& c) { return !c.witness.has_value(); }

enum class PerPatientAin { brute_force, assume_continuous };

struct Theorem1Options {
  PerPatientAin per_patient_ain = PerPatientAin::brute_force;
  double tolerance = 1e-10;
};

/// Sufficient condition for a unique gLOP solution: every X^k AIN and either
/// lambda_L > lambda_g, or kappa even with lambda_L / lambda_g > 1/2.
UniquenessCertificate theorem1_certificate(const MultiTaskDataset& dataset,
                                           const GlopPenalty& penalty,
                                           const Theorem1Options& options = {});

/// The penalty-ratio certificate first; when that is inconclusive, falls back to the rank of the
/// equicorrelation columns of the stacked design at the fitted model.
UniquenessCertificate certify_model(const MultiTaskDataset& dataset, const GlopModel& model,
                                    const Theorem1Options& options = {});

}  // namespace glop
