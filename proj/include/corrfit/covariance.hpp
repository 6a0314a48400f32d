#ifndef CORRFIT_COVARIANCE_HPP
#define CORRFIT_COVARIANCE_HPP

#include <span>
#include <vector>

#include "corrfit/matrix.hpp"
#include "corrfit/symmat.hpp"

namespace corrfit {

// Uncorrelated per-point uncertainties plus K shared correlation parameters.
// jacobian(i,k) is the sensitivity of point i's distance to parameter k and
// delta_u(k) that parameter's 1-sigma uncertainty.
struct CorrelationModel {
  Vector sigma;
  Matrix jacobian;  // N x K
  Vector delta_u;   // K

  static CorrelationModel uncorrelated(Vector sigma);

  std::size_t points() const noexcept { return sigma.size(); }
  std::size_t parameters() const noexcept { return delta_u.size(); }

  /// Throws DimensionMismatch, NonPositiveSigma or InvalidArgument.
  void validate() const;

  /// Model restricted to the given point indices (in the given order).
  CorrelationModel subset(std::span<const std::size_t> points) const;
};

/// V = diag(sigma^2) + J diag(delta_u^2) J^T.
/// The correlated term is included on the diagonal, which keeps V positive
/// definite whenever every sigma is positive.
SymmetricMatrix assemble_covariance(const CorrelationModel& model);

}  // namespace corrfit

#endif
