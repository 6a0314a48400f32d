#include "corrfit/outlier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace corrfit {

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::Naive: return "naive";
    case Strategy::BruteForce: return "brute-force";
    case Strategy::Downdate: return "downdate";
    case Strategy::DeltaChi2: return "delta-chi2";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (auto s : {Strategy::Naive, Strategy::BruteForce, Strategy::Downdate, Strategy::DeltaChi2})
    if (name == to_string(s)) return s;
  throw Error(ErrorCode::InvalidArgument, "unknown strategy '" + std::string(name) + "'");
}

std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxRemovals: return "max-removals";
    case Termination::MinSurviving: return "min-surviving";
  }
  return "unknown";
}

std::vector<OutlierScore> naive_scores(std::span<const double> residuals, std::span<const double> sigma,
                                       const std::vector<bool>& removed) {
  if (residuals.size() != sigma.size() || removed.size() != sigma.size())
    throw Error(ErrorCode::DimensionMismatch, "residual, sigma and mask lengths differ");
  std::vector<OutlierScore> out;
  out.reserve(sigma.size());
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    if (removed[k]) continue;
    if (!(sigma[k] > 0.0)) throw Error(ErrorCode::NonPositiveSigma, "sigma of point " + std::to_string(k));
    out.push_back({k, std::abs(residuals[k]) / sigma[k], Strategy::Naive});
  }
  return out;
}

std::vector<OutlierScore> naive_scores(std::span<const double> residuals, std::span<const double> sigma) {
  return naive_scores(residuals, sigma, std::vector<bool>(sigma.size(), false));
}

namespace {

void check_lengths(const PrecisionMatrix& precision, std::span<const double> residuals) {
  if (residuals.size() != precision.size()) {
    throw Error(ErrorCode::DimensionMismatch, "residual length " + std::to_string(residuals.size()) +
                                                  " vs precision dimension " + std::to_string(precision.size()));
  }
}

// Returns (sum_j W(k,j) eps_j, W(k,k)).
std::pair<double, double> projected_residual(const PrecisionMatrix& precision, std::span<const double> residuals,
                                             std::size_t k) {
  if (k >= precision.size()) throw Error(ErrorCode::InvalidArgument, "point index " + std::to_string(k) + " out of range");
  if (precision.is_removed(k))
    throw Error(ErrorCode::PointAlreadyRemoved, "point " + std::to_string(k) + " was already removed");
  const double pkk = precision(k, k);
  if (!(pkk > pivot_tolerance(precision.entries())))
    throw Error(ErrorCode::DegeneratePivot, "precision diagonal at point " + std::to_string(k) + " is " + std::to_string(pkk));
  const auto row = precision.row(k);
  double s = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * residuals[j];
  return {s, pkk};
}

double score_from_difference(double chi2, double chi2_k) { return std::sqrt(std::max(0.0, chi2 - chi2_k)); }

}  // namespace

double retained_chi2_without(const PrecisionMatrix& precision, std::span<const double> residuals, std::size_t k) {
  check_lengths(precision, residuals);
  const auto [s, pkk] = projected_residual(precision, residuals, k);
  return quadratic_form(precision, residuals) - s * s / pkk;
}

OutlierScore delta_chi2_score(const PrecisionMatrix& precision, std::span<const double> residuals, std::size_t k) {
  check_lengths(precision, residuals);
  const auto [s, pkk] = projected_residual(precision, residuals, k);
  return {k, std::abs(s) / std::sqrt(pkk), Strategy::DeltaChi2};
}

std::vector<OutlierScore> delta_chi2_scores(const PrecisionMatrix& precision, std::span<const double> residuals) {
  check_lengths(precision, residuals);
  std::vector<OutlierScore> out;
  out.reserve(precision.surviving_count());
  for (std::size_t k = 0; k < precision.size(); ++k) {
    if (precision.is_removed(k)) continue;
    const auto [s, pkk] = projected_residual(precision, residuals, k);
    out.push_back({k, std::abs(s) / std::sqrt(pkk), Strategy::DeltaChi2});
  }
  return out;
}

namespace {

// quadratic_form(downdate(p, k), eps), with each downdated row built in
// `row` and consumed at once instead of materializing the whole matrix.
double downdated_quadratic_form(const PrecisionMatrix& p, std::size_t k, std::span<const double> eps,
                                Vector& row) {
  const std::size_t n = p.size();
  const double r = 1.0 / p(k, k);
  const auto pk = p.row(k);
  row.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == k || eps[i] == 0.0) continue;
    const double a = pk[i];
    const auto pi = p.row(i);
    for (std::size_t j = 0; j < n; ++j) row[j] = pi[j] - (a * pk[j]) * r;
    row[k] = 0.0;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += row[j] * eps[j];
    total += eps[i] * s;
  }
  return total;
}

}  // namespace

std::vector<OutlierScore> downdate_scores(const PrecisionMatrix& precision, std::span<const double> residuals) {
  check_lengths(precision, residuals);
  const double chi2 = quadratic_form(precision, residuals);
  Vector row;
  std::vector<OutlierScore> out;
  out.reserve(precision.surviving_count());
  for (std::size_t k = 0; k < precision.size(); ++k) {
    if (precision.is_removed(k)) continue;
    projected_residual(precision, residuals, k);  // validates the pivot
    out.push_back({k, score_from_difference(chi2, downdated_quadratic_form(precision, k, residuals, row)),
                   Strategy::Downdate});
  }
  return out;
}

std::vector<OutlierScore> downdate_refit_scores(const FitProblem& problem) {
  const PrecisionMatrix& precision = problem.precision;
  const double chi2 = gls_fit(problem).chi2;
  PrecisionMatrix scratch(SymmetricMatrix(precision.size()));
  std::vector<OutlierScore> out;
  out.reserve(precision.surviving_count());
  for (std::size_t k = 0; k < precision.size(); ++k) {
    if (precision.is_removed(k)) continue;
    downdate_into(precision, k, scratch);
    const double chi2_k = gls_fit(problem.design, problem.observations, scratch).chi2;
    out.push_back({k, score_from_difference(chi2, chi2_k), Strategy::Downdate});
  }
  return out;
}

namespace {

// Fit over exactly `points`, with V rebuilt from the model and inverted afresh.
FitResult fit_subset(const FitProblem& problem, const CorrelationModel& model, std::span<const std::size_t> points) {
  const std::size_t P = problem.parameters();
  if (points.size() < P) {
    throw Error(ErrorCode::TooFewPoints,
                std::to_string(points.size()) + " points left for " + std::to_string(P) + " parameters");
  }
  Matrix design(points.size(), P);
  Vector y(points.size());
  for (std::size_t a = 0; a < points.size(); ++a) {
    const auto src = problem.design.row(points[a]);
    std::copy(src.begin(), src.end(), design.row(a).begin());
    y[a] = problem.observations[points[a]];
  }
  // Plain LDL^T inversion: this path is the O(N^4) reference and runs once per candidate.
  return gls_fit(design, y, invert(assemble_covariance(model.subset(points)), {.refine = false}));
}

void check_model(const FitProblem& problem, const CorrelationModel& model) {
  if (model.points() != problem.points()) {
    throw Error(ErrorCode::DimensionMismatch, "correlation model has " + std::to_string(model.points()) +
                                                  " points, problem has " + std::to_string(problem.points()));
  }
}

double brute_force_one(const FitProblem& problem, const CorrelationModel& model,
                       const std::vector<std::size_t>& survivors, std::size_t k, double chi2) {
  std::vector<std::size_t> rest;
  rest.reserve(survivors.size());
  for (auto i : survivors)
    if (i != k) rest.push_back(i);
  return score_from_difference(chi2, fit_subset(problem, model, rest).chi2);
}

}  // namespace

OutlierScore brute_force_score(const FitProblem& problem, const CorrelationModel& model, std::size_t k) {
  check_model(problem, model);
  if (k >= problem.points()) throw Error(ErrorCode::InvalidArgument, "point index " + std::to_string(k) + " out of range");
  if (problem.precision.is_removed(k))
    throw Error(ErrorCode::PointAlreadyRemoved, "point " + std::to_string(k) + " was already removed");
  const auto survivors = problem.precision.surviving();
  const double chi2 = fit_subset(problem, model, survivors).chi2;
  return {k, brute_force_one(problem, model, survivors, k, chi2), Strategy::BruteForce};
}

std::vector<OutlierScore> brute_force_scores(const FitProblem& problem, const CorrelationModel& model) {
  check_model(problem, model);
  const auto survivors = problem.precision.surviving();
  const double chi2 = fit_subset(problem, model, survivors).chi2;
  std::vector<OutlierScore> out;
  out.reserve(survivors.size());
  for (auto k : survivors) out.push_back({k, brute_force_one(problem, model, survivors, k, chi2), Strategy::BruteForce});
  return out;
}

std::vector<OutlierScore> score_points(Strategy strategy, bool refit, const FitProblem& problem,
                                       const CorrelationModel& model, std::span<const double> residuals) {
  switch (strategy) {
    case Strategy::Naive: return naive_scores(residuals, model.sigma, problem.precision.removed_mask());
    case Strategy::DeltaChi2: return delta_chi2_scores(problem.precision, residuals);
    case Strategy::Downdate:
      return refit ? downdate_refit_scores(problem) : downdate_scores(problem.precision, residuals);
    case Strategy::BruteForce: return brute_force_scores(problem, model);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown strategy");
}

EliminationReport eliminate(const FitProblem& problem, const CorrelationModel& model,
                            const EliminationConfig& config) {
  check_model(problem, model);
  model.validate();
  const std::size_t P = problem.parameters();
  const std::size_t floor = config.min_surviving.value_or(P);
  if (!(config.d_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "d_max must be positive");
  if (floor < P) {
    throw Error(ErrorCode::InvalidArgument, "min_surviving " + std::to_string(floor) + " is below the " +
                                                std::to_string(P) + " fit parameters");
  }
  if (problem.precision.surviving_count() < floor) {
    throw Error(ErrorCode::TooFewPoints, std::to_string(problem.precision.surviving_count()) +
                                             " surviving points, minimum is " + std::to_string(floor));
  }

  EliminationReport report;
  report.config = config;
  FitProblem current = problem;
  report.initial_fit = gls_fit(current);
  FitResult fit = report.initial_fit;
  const Vector retained = report.initial_fit.residuals;

  // Refitting strategies cannot score once a removal would leave fewer than P points.
  const bool refits_candidates =
      config.strategy == Strategy::BruteForce || (config.strategy == Strategy::Downdate && config.refit_each_iteration);

  for (;;) {
    const std::size_t alive = current.precision.surviving_count();
    const auto& residuals = config.refit_each_iteration ? fit.residuals : retained;
    report.scores_final.clear();
    if (!refits_candidates || alive > P)
      report.scores_final = score_points(config.strategy, config.refit_each_iteration, current, model, residuals);

    // Strict comparison keeps the lowest index on ties.
    const OutlierScore* worst = nullptr;
    for (const auto& s : report.scores_final)
      if (worst == nullptr || s.value > worst->value) worst = &s;

    if (worst != nullptr && worst->value <= config.d_max) {
      report.termination = Termination::Converged;
      break;
    }
    if (alive <= floor || worst == nullptr) {
      report.termination = Termination::MinSurviving;
      break;
    }
    if (report.iterations.size() >= config.max_removals) {
      report.termination = Termination::MaxRemovals;
      break;
    }

    EliminationStep step{worst->point, worst->value, 0.0, 0.0};
    if (config.refit_each_iteration) {
      step.chi2_before = fit.chi2;
      downdate_in_place(current.precision, step.point);
      fit = gls_fit(current);
      step.chi2_after = fit.chi2;
    } else {
      step.chi2_before = quadratic_form(current.precision, retained);
      downdate_in_place(current.precision, step.point);
      step.chi2_after = quadratic_form(current.precision, retained);
    }
    report.iterations.push_back(step);
  }

  report.final_fit = gls_fit(current);
  report.surviving = current.precision.surviving();
  return report;
}

}  // namespace corrfit
