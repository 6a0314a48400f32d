#include "corrfit/covariance.hpp"

#include <cmath>
#include <string>

namespace corrfit {

CorrelationModel CorrelationModel::uncorrelated(Vector sigma) {
  const std::size_t n = sigma.size();
  return CorrelationModel{std::move(sigma), Matrix(n, 0), {}};
}

void CorrelationModel::validate() const {
  if (sigma.empty()) throw Error(ErrorCode::InvalidArgument, "correlation model has no points");
  if (jacobian.rows() != sigma.size()) {
    throw Error(ErrorCode::DimensionMismatch, "jacobian has " + std::to_string(jacobian.rows()) +
                                                  " rows for " + std::to_string(sigma.size()) + " points");
  }
  if (jacobian.cols() != delta_u.size()) {
    throw Error(ErrorCode::DimensionMismatch, "jacobian has " + std::to_string(jacobian.cols()) +
                                                  " columns for " + std::to_string(delta_u.size()) +
                                                  " correlation parameters");
  }
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (!(sigma[i] > 0.0) || !std::isfinite(sigma[i]))
      throw Error(ErrorCode::NonPositiveSigma, "sigma of point " + std::to_string(i) + " is " + std::to_string(sigma[i]));
  }
  for (std::size_t k = 0; k < delta_u.size(); ++k) {
    if (!(delta_u[k] >= 0.0) || !std::isfinite(delta_u[k]))
      throw Error(ErrorCode::InvalidArgument, "delta_u[" + std::to_string(k) + "] must be finite and non-negative");
  }
}

CorrelationModel CorrelationModel::subset(std::span<const std::size_t> points) const {
  CorrelationModel out{Vector(points.size()), Matrix(points.size(), jacobian.cols()), delta_u};
  for (std::size_t a = 0; a < points.size(); ++a) {
    const std::size_t i = points[a];
    if (i >= sigma.size()) throw Error(ErrorCode::InvalidArgument, "point index out of range");
    out.sigma[a] = sigma[i];
    for (std::size_t k = 0; k < jacobian.cols(); ++k) out.jacobian(a, k) = jacobian(i, k);
  }
  return out;
}

SymmetricMatrix assemble_covariance(const CorrelationModel& model) {
  model.validate();
  const std::size_t n = model.points();
  const std::size_t K = model.parameters();

  Vector var(K);
  for (std::size_t k = 0; k < K; ++k) var[k] = model.delta_u[k] * model.delta_u[k];

  SymmetricMatrix v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto Ji = model.jacobian.row(i);
    for (std::size_t j = 0; j <= i; ++j) {
      const auto Jj = model.jacobian.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < K; ++k) s += Ji[k] * Jj[k] * var[k];
      if (i == j) s += model.sigma[i] * model.sigma[i];
      v.set(i, j, s);
    }
  }
  return v;
}

}  // namespace corrfit
