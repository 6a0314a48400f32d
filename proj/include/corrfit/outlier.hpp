#ifndef CORRFIT_OUTLIER_HPP
#define CORRFIT_OUTLIER_HPP

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "corrfit/covariance.hpp"
#include "corrfit/fit.hpp"
#include "corrfit/symmat.hpp"

namespace corrfit {

enum class Strategy {
  Naive,       // |eps_k| / sigma_k
  BruteForce,  // delete, reassemble, invert, refit: O(N^3) per point
  Downdate,    // downdate the precision matrix per point: O(N^2) per point
  DeltaChi2,   // closed-form chi2 change with retained residuals: O(N) per point
};

std::string_view to_string(Strategy s) noexcept;
/// Accepts "naive", "brute-force", "downdate", "delta-chi2".
Strategy parse_strategy(std::string_view name);

struct OutlierScore {
  std::size_t point = 0;
  double value = 0.0;  // D_k >= 0
  Strategy strategy = Strategy::DeltaChi2;
};

/// D_k = |eps_k| / sigma_k for every point.
std::vector<OutlierScore> naive_scores(std::span<const double> residuals, std::span<const double> sigma);
/// As above, skipping points flagged in `removed`.
std::vector<OutlierScore> naive_scores(std::span<const double> residuals, std::span<const double> sigma,
                                       const std::vector<bool>& removed);

/// chi2 of the retained residuals after removing point k:
///   chi2 - (sum_j W(k,j) eps_j)^2 / W(k,k)
/// Needs only row k of W.
double retained_chi2_without(const PrecisionMatrix& precision, std::span<const double> residuals,
                             std::size_t k);

/// D_k = sqrt(chi2 - chi2_k) = |sum_j W(k,j) eps_j| / sqrt(W(k,k)), O(N).
/// Throws PointAlreadyRemoved or DegeneratePivot.
OutlierScore delta_chi2_score(const PrecisionMatrix& precision, std::span<const double> residuals, std::size_t k);
std::vector<OutlierScore> delta_chi2_scores(const PrecisionMatrix& precision, std::span<const double> residuals);

/// For each surviving k: chi2_k = quadratic_form(downdate(W, k), eps) with the
/// residuals held fixed, D_k = sqrt(chi2 - chi2_k). O(N^3) per pass.
std::vector<OutlierScore> downdate_scores(const PrecisionMatrix& precision, std::span<const double> residuals);

/// For each surviving k: downdate W and refit the model with the downdated
/// precision, D_k = sqrt(chi2 - chi2_k) with both chi2 values minimised.
/// Equivalent to brute force at O(N^2 P) per point.
std::vector<OutlierScore> downdate_refit_scores(const FitProblem& problem);

/// Physically deletes point k (and every already-removed point) from the
/// model, reassembles and inverts the smaller covariance, refits, and
/// returns D_k = sqrt(chi2 - chi2_k). The survivor set is taken from
/// problem.precision; the precision entries themselves are not used.
OutlierScore brute_force_score(const FitProblem& problem, const CorrelationModel& model, std::size_t k);
std::vector<OutlierScore> brute_force_scores(const FitProblem& problem, const CorrelationModel& model);

struct EliminationConfig {
  double d_max = 3.0;
  Strategy strategy = Strategy::DeltaChi2;
  // Refit the model after each removal and, for Downdate, for every
  // candidate removal. Off: residuals of the first fit are retained.
  bool refit_each_iteration = false;
  std::size_t max_removals = std::numeric_limits<std::size_t>::max();
  // Defaults to the number of fit parameters.
  std::optional<std::size_t> min_surviving;
};

/// One full scoring pass of every surviving point. `residuals` feed the
/// fixed-residual strategies; the refitting ones recompute their own.
std::vector<OutlierScore> score_points(Strategy strategy, bool refit, const FitProblem& problem,
                                       const CorrelationModel& model, std::span<const double> residuals);

struct EliminationStep {
  std::size_t point = 0;
  double score = 0.0;
  double chi2_before = 0.0;
  double chi2_after = 0.0;
};

enum class Termination { Converged, MaxRemovals, MinSurviving };
std::string_view to_string(Termination t) noexcept;

struct EliminationReport {
  EliminationConfig config;
  FitResult initial_fit;
  std::vector<EliminationStep> iterations;
  FitResult final_fit;
  std::vector<std::size_t> surviving;
  std::vector<OutlierScore> scores_final;
  Termination termination = Termination::Converged;
};

/// Repeatedly removes the surviving point with the largest D (lowest index
/// on ties) while that D exceeds d_max. The precision matrix is downdated
/// after each removal so later scores see earlier removals.
/// Throws TooFewPoints if the problem starts below min_surviving.
EliminationReport eliminate(const FitProblem& problem, const CorrelationModel& model,
                            const EliminationConfig& config);

}  // namespace corrfit

#endif
