#ifndef CORRFIT_FIT_HPP
#define CORRFIT_FIT_HPP

#include <span>

#include "corrfit/matrix.hpp"
#include "corrfit/symmat.hpp"

namespace corrfit {

// Linear model: prediction_i = sum_a design(i,a) * beta_a.
struct FitProblem {
  Matrix design;        // N x P
  Vector observations;  // N
  PrecisionMatrix precision;

  std::size_t points() const noexcept { return observations.size(); }
  std::size_t parameters() const noexcept { return design.cols(); }
};

struct FitResult {
  Vector parameters;  // P
  Vector residuals;   // N, y - X beta, zero at removed points
  double chi2 = 0.0;
  std::size_t dof = 0;  // surviving points - P
  SymmetricMatrix parameter_covariance{1};
};

/// Generalized least squares: beta solves (X^T W X) beta = X^T W y with W the
/// (possibly downdated) precision. Removed points have zero rows in W and
/// drop out of the normal equations.
/// Throws TooFewPoints or RankDeficientDesign.
FitResult gls_fit(const FitProblem& problem);
FitResult gls_fit(const Matrix& design, std::span<const double> observations, const PrecisionMatrix& precision);

/// epsilon^T W epsilon.
double chi_squared(std::span<const double> residuals, const PrecisionMatrix& precision);

}  // namespace corrfit

#endif
