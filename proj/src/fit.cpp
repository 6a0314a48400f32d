#include "corrfit/fit.hpp"

#include <string>

namespace corrfit {

namespace {

// Normal matrices with condition number beyond ~1e12 are treated as singular.
constexpr double kRankTolerance = 1e-12;

void validate(const Matrix& X, std::span<const double> y, const PrecisionMatrix& W) {
  const std::size_t n = y.size();
  if (X.rows() != n)
    throw Error(ErrorCode::DimensionMismatch,
                "design has " + std::to_string(X.rows()) + " rows for " + std::to_string(n) + " observations");
  if (W.size() != n)
    throw Error(ErrorCode::DimensionMismatch,
                "precision dimension " + std::to_string(W.size()) + " for " + std::to_string(n) + " observations");
  if (X.cols() == 0) throw Error(ErrorCode::InvalidArgument, "model has no parameters");
  if (W.surviving_count() < X.cols()) {
    throw Error(ErrorCode::TooFewPoints, std::to_string(W.surviving_count()) + " surviving points for " +
                                             std::to_string(X.cols()) + " parameters");
  }
}

}  // namespace

FitResult gls_fit(const FitProblem& problem) {
  return gls_fit(problem.design, problem.observations, problem.precision);
}

FitResult gls_fit(const Matrix& X, std::span<const double> y, const PrecisionMatrix& W) {
  validate(X, y, W);
  const std::size_t n = y.size();
  const std::size_t P = X.cols();
  const auto& removed = W.removed_mask();

  // WX (N x P) and Wy; removed rows of W are zero so their products vanish.
  Matrix WX(n, P);
  Vector Wy(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (removed[i]) continue;
    const auto Wi = W.row(i);
    const auto out = WX.row(i);
    double sy = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = Wi[j];
      if (w == 0.0) continue;
      const auto Xj = X.row(j);
      for (std::size_t a = 0; a < P; ++a) out[a] += w * Xj[a];
      sy += w * y[j];
    }
    Wy[i] = sy;
  }

  SymmetricMatrix normal(P);
  Vector rhs(P, 0.0);
  for (std::size_t a = 0; a < P; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += X(i, a) * WX(i, b);
      normal.set(a, b, s);
    }
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) r += X(i, a) * Wy[i];
    rhs[a] = r;
  }

  LdlFactor factor;
  try {
    factor = decompose(normal, {.require_positive_definite = true,
                                .pivot_tolerance = kRankTolerance * normal.max_abs_diagonal()});
  } catch (const Error& e) {
    throw Error(ErrorCode::RankDeficientDesign, e.what());
  }

  FitResult result;
  result.parameters = factor.solve(rhs);
  result.parameter_covariance = inverse_of(factor);
  result.residuals.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (removed[i]) continue;
    const auto Xi = X.row(i);
    double pred = 0.0;
    for (std::size_t a = 0; a < P; ++a) pred += Xi[a] * result.parameters[a];
    result.residuals[i] = y[i] - pred;
  }
  result.chi2 = quadratic_form(W, result.residuals);
  result.dof = W.surviving_count() - P;
  return result;
}

double chi_squared(std::span<const double> residuals, const PrecisionMatrix& precision) {
  return quadratic_form(precision, residuals);
}

}  // namespace corrfit
