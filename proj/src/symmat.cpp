#include "corrfit/symmat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace corrfit {

SymmetricMatrix::SymmetricMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "symmetric matrix dimension must be at least 1");
}

SymmetricMatrix SymmetricMatrix::identity(std::size_t n) {
  SymmetricMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = 1.0;
  return m;
}

SymmetricMatrix SymmetricMatrix::diagonal(std::span<const double> diag) {
  SymmetricMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.data_[i * m.n_ + i] = diag[i];
  return m;
}

SymmetricMatrix SymmetricMatrix::from_matrix(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::InvalidArgument, "matrix is not square");
  SymmetricMatrix s(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      if (m(i, j) != m(j, i)) {
        throw Error(ErrorCode::InvalidArgument,
                    "matrix is not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
      s.set(i, j, m(i, j));
    }
  }
  return s;
}

double SymmetricMatrix::max_abs_diagonal() const noexcept {
  double best = 0.0;
  for (std::size_t i = 0; i < n_; ++i) best = std::max(best, std::abs(data_[i * n_ + i]));
  return best;
}

SymmetricMatrix delete_row_col(const SymmetricMatrix& m, std::size_t k) {
  const std::size_t n = m.size();
  if (k >= n) throw Error(ErrorCode::InvalidArgument, "index out of range");
  if (n == 1) throw Error(ErrorCode::InvalidArgument, "cannot delete the only row of a 1x1 matrix");
  SymmetricMatrix out(n - 1);
  for (std::size_t i = 0, oi = 0; i < n; ++i) {
    if (i == k) continue;
    for (std::size_t j = 0, oj = 0; j <= i; ++j) {
      if (j == k) continue;
      out.set(oi, oj, m(i, j));
      ++oj;
    }
    ++oi;
  }
  return out;
}

PrecisionMatrix::PrecisionMatrix(SymmetricMatrix entries)
    : entries_(std::move(entries)), removed_(entries_.size(), false) {}

std::vector<std::size_t> PrecisionMatrix::removed() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < removed_.size(); ++i)
    if (removed_[i]) out.push_back(i);
  return out;
}

std::vector<std::size_t> PrecisionMatrix::surviving() const {
  std::vector<std::size_t> out;
  out.reserve(surviving_count());
  for (std::size_t i = 0; i < removed_.size(); ++i)
    if (!removed_[i]) out.push_back(i);
  return out;
}

SymmetricMatrix PrecisionMatrix::surviving_block() const {
  const auto keep = surviving();
  if (keep.empty()) throw Error(ErrorCode::TooFewPoints, "no surviving points");
  SymmetricMatrix out(keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = 0; b <= a; ++b) out.set(a, b, entries_(keep[a], keep[b]));
  return out;
}

double pivot_tolerance(const SymmetricMatrix& m) noexcept {
  return static_cast<double>(m.size()) * std::numeric_limits<double>::epsilon() * m.max_abs_diagonal();
}

LdlFactor decompose(const SymmetricMatrix& m, const DecomposeOptions& options) {
  const std::size_t n = m.size();
  const double tol = options.pivot_tolerance.value_or(pivot_tolerance(m));

  LdlFactor f{Matrix(n, n), Vector(n, 0.0)};
  Matrix& L = f.unit_lower;
  Vector& d = f.pivots;
  Vector w(n);  // w[k] = L(j,k) * d[k] for the current column j

  for (std::size_t j = 0; j < n; ++j) {
    const auto Lj = L.row(j);
    double djj = m(j, j);
    for (std::size_t k = 0; k < j; ++k) {
      w[k] = Lj[k] * d[k];
      djj -= Lj[k] * w[k];
    }
    if (std::abs(djj) <= tol) {
      throw Error(ErrorCode::SingularMatrix, "pivot " + std::to_string(j) + " is " + std::to_string(djj) +
                                                 " (tolerance " + std::to_string(tol) + ")");
    }
    if (options.require_positive_definite && djj < 0.0) {
      throw Error(ErrorCode::NotPositiveDefinite, "pivot " + std::to_string(j) + " is negative");
    }
    d[j] = djj;
    Lj[j] = 1.0;
    for (std::size_t i = j + 1; i < n; ++i) {
      const auto Li = L.row(i);
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= Li[k] * w[k];
      Li[j] = s / djj;
    }
  }
  return f;
}

Vector LdlFactor::solve(std::span<const double> b) const {
  const std::size_t n = size();
  if (b.size() != n) throw Error(ErrorCode::DimensionMismatch, "right-hand side length");
  Vector x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    const auto Li = unit_lower.row(i);
    for (std::size_t k = 0; k < i; ++k) x[i] -= Li[k] * x[k];
  }
  for (std::size_t i = 0; i < n; ++i) x[i] /= pivots[i];
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) x[i] -= unit_lower(k, i) * x[k];
  }
  return x;
}

SymmetricMatrix inverse_of(const LdlFactor& factor) {
  const std::size_t n = factor.size();
  const Matrix& L = factor.unit_lower;

  // Row j of `u` holds column j of L^-1 (zero left of the diagonal).
  Matrix u(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto uj = u.row(j);
    uj[j] = 1.0;
    for (std::size_t i = j + 1; i < n; ++i) {
      const auto Li = L.row(i);
      double s = 0.0;
      for (std::size_t k = j; k < i; ++k) s -= Li[k] * uj[k];
      uj[i] = s;
    }
  }
  // scaled(j,m) = u(j,m) / d(m)
  Matrix scaled(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j; k < n; ++k) scaled(j, k) = u(j, k) / factor.pivots[k];

  // inv(i,j) = sum_{m >= max(i,j)} u(i,m) u(j,m) / d(m)
  SymmetricMatrix inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ui = u.row(i);
    for (std::size_t j = i; j < n; ++j) {
      const auto sj = scaled.row(j);
      double s = 0.0;
      for (std::size_t k = j; k < n; ++k) s += ui[k] * sj[k];
      inv.set(i, j, s);
    }
  }
  return inv;
}

SymmetricMatrix refine_inverse(const SymmetricMatrix& m, const SymmetricMatrix& x) {
  const std::size_t n = m.size();
  if (x.size() != n) throw Error(ErrorCode::DimensionMismatch, "inverse estimate has the wrong dimension");

  // residual = I - m x; x is symmetric so column j of x is row j.
  Matrix residual(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto mi = m.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      const auto xj = x.row(j);
      long double s = i == j ? 1.0L : 0.0L;
      for (std::size_t k = 0; k < n; ++k) s -= static_cast<long double>(mi[k]) * xj[k];
      residual(i, j) = static_cast<double>(s);
    }
  }
  Matrix correction(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = x.row(i);
    const auto ci = correction.row(i);
    for (std::size_t k = 0; k < n; ++k) {
      const double a = xi[k];
      const auto rk = residual.row(k);
      for (std::size_t j = 0; j < n; ++j) ci[j] += a * rk[j];
    }
  }
  SymmetricMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) out.set(i, j, x(i, j) + 0.5 * (correction(i, j) + correction(j, i)));
  return out;
}

PrecisionMatrix invert(const SymmetricMatrix& m, const InvertOptions& options) {
  auto x = inverse_of(decompose(m, {.require_positive_definite = true, .pivot_tolerance = std::nullopt}));
  if (options.refine) x = refine_inverse(m, x);
  return PrecisionMatrix(std::move(x));
}

namespace {

double checked_pivot(const PrecisionMatrix& p, std::size_t k) {
  if (k >= p.size()) throw Error(ErrorCode::InvalidArgument, "point index " + std::to_string(k) + " out of range");
  if (p.is_removed(k))
    throw Error(ErrorCode::DegeneratePivot, "point " + std::to_string(k) + " was already removed");
  const double pkk = p(k, k);
  const double tol = pivot_tolerance(p.entries());
  if (!(pkk > tol)) {
    throw Error(ErrorCode::DegeneratePivot,
                "precision diagonal at point " + std::to_string(k) + " is " + std::to_string(pkk));
  }
  return pkk;
}

}  // namespace

void downdate_into(const PrecisionMatrix& p, std::size_t k, PrecisionMatrix& out) {
  if (&p == &out) {
    downdate_in_place(out, k);
    return;
  }
  const double pkk = checked_pivot(p, k);
  const std::size_t n = p.size();
  if (out.size() != n) out = PrecisionMatrix(SymmetricMatrix(n));

  const double r = 1.0 / pkk;
  const double* src = p.entries_.data_.data();
  double* dst = out.entries_.data_.data();
  const double* pk = src + k * n;
  // (p(i,k) * p(k,j)) * r is the same product for (i,j) and (j,i): bitwise symmetric.
  for (std::size_t i = 0; i < n; ++i) {
    const double a = pk[i];
    const double* pi = src + i * n;
    double* oi = dst + i * n;
    for (std::size_t j = 0; j < n; ++j) oi[j] = pi[j] - (a * pk[j]) * r;
  }
  for (std::size_t i = 0; i < n; ++i) {
    dst[k * n + i] = 0.0;
    dst[i * n + k] = 0.0;
  }
  out.removed_ = p.removed_;
  out.removed_[k] = true;
  out.removed_count_ = p.removed_count_ + 1;
}

PrecisionMatrix downdate(const PrecisionMatrix& p, std::size_t k) {
  PrecisionMatrix out(SymmetricMatrix(p.size()));
  downdate_into(p, k, out);
  return out;
}

void downdate_in_place(PrecisionMatrix& p, std::size_t k) {
  const double pkk = checked_pivot(p, k);
  const std::size_t n = p.size();
  const double r = 1.0 / pkk;
  double* data = p.entries_.data_.data();
  const Vector pk(data + k * n, data + (k + 1) * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = pk[i];
    double* pi = data + i * n;
    for (std::size_t j = 0; j < n; ++j) pi[j] -= (a * pk[j]) * r;
  }
  for (std::size_t i = 0; i < n; ++i) {
    data[k * n + i] = 0.0;
    data[i * n + k] = 0.0;
  }
  p.removed_[k] = true;
  ++p.removed_count_;
}

double quadratic_form(const SymmetricMatrix& m, std::span<const double> v) {
  const std::size_t n = m.size();
  if (v.size() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "vector length " + std::to_string(v.size()) + " vs matrix dimension " + std::to_string(n));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] == 0.0) continue;
    const auto mi = m.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += mi[j] * v[j];
    total += v[i] * s;
  }
  return total;
}

double quadratic_form(const PrecisionMatrix& p, std::span<const double> v) { return quadratic_form(p.entries(), v); }

}  // namespace corrfit
