#ifndef CORRFIT_SYMMAT_HPP
#define CORRFIT_SYMMAT_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "corrfit/matrix.hpp"

namespace corrfit {

class PrecisionMatrix;
void downdate_into(const PrecisionMatrix& p, std::size_t k, PrecisionMatrix& out);
void downdate_in_place(PrecisionMatrix& p, std::size_t k);

/// Dense N x N symmetric matrix. Both triangles are stored and every write
/// goes to (i,j) and (j,i), so symmetry holds bitwise.
class SymmetricMatrix {
public:
  explicit SymmetricMatrix(std::size_t n);

  static SymmetricMatrix identity(std::size_t n);
  static SymmetricMatrix diagonal(std::span<const double> diag);
  /// Throws InvalidArgument unless `m` is square and exactly symmetric.
  static SymmetricMatrix from_matrix(const Matrix& m);

  std::size_t size() const noexcept { return n_; }

  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double value) noexcept {
    data_[i * n_ + j] = value;
    data_[j * n_ + i] = value;
  }
  void add(std::size_t i, std::size_t j, double value) noexcept {
    data_[i * n_ + j] += value;
    if (i != j) data_[j * n_ + i] += value;
  }

  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * n_, n_}; }
  double max_abs_diagonal() const noexcept;

  friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

private:
  friend class PrecisionMatrix;
  friend void downdate_into(const PrecisionMatrix&, std::size_t, PrecisionMatrix&);
  friend void downdate_in_place(PrecisionMatrix&, std::size_t);

  std::size_t n_;
  std::vector<double> data_;
};

/// Copy of `m` with row and column k deleted.
SymmetricMatrix delete_row_col(const SymmetricMatrix& m, std::size_t k);

/// Inverse covariance V^-1, possibly downdated. Rows and columns of
/// removed points are exactly zero; the block over surviving points is the
/// inverse of the covariance restricted to those points.
class PrecisionMatrix {
public:
  /// Adopts `entries` as a precision matrix with no removed points.
  explicit PrecisionMatrix(SymmetricMatrix entries);

  std::size_t size() const noexcept { return entries_.size(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_(i, j); }
  std::span<const double> row(std::size_t i) const noexcept { return entries_.row(i); }
  const SymmetricMatrix& entries() const noexcept { return entries_; }

  bool is_removed(std::size_t k) const noexcept { return removed_[k]; }
  const std::vector<bool>& removed_mask() const noexcept { return removed_; }
  std::vector<std::size_t> removed() const;
  std::vector<std::size_t> surviving() const;
  std::size_t surviving_count() const noexcept { return size() - removed_count_; }

  /// Sub-block over surviving indices, in ascending index order.
  SymmetricMatrix surviving_block() const;

  friend bool operator==(const PrecisionMatrix&, const PrecisionMatrix&) = default;

private:
  friend void downdate_into(const PrecisionMatrix&, std::size_t, PrecisionMatrix&);
  friend void downdate_in_place(PrecisionMatrix&, std::size_t);

  SymmetricMatrix entries_;
  std::vector<bool> removed_;
  std::size_t removed_count_ = 0;
};

/// Unit lower-triangular factor L and pivots D with m = L D L^T.
struct LdlFactor {
  Matrix unit_lower;
  Vector pivots;

  std::size_t size() const noexcept { return pivots.size(); }
  /// Solves m x = b.
  Vector solve(std::span<const double> b) const;
};

struct DecomposeOptions {
  bool require_positive_definite = false;
  // Absolute pivot threshold; defaults to pivot_tolerance(m).
  std::optional<double> pivot_tolerance;
};

/// n * machine epsilon * max |m(i,i)|.
double pivot_tolerance(const SymmetricMatrix& m) noexcept;

/// Symmetric LDL^T elimination without pivoting.
/// Throws SingularMatrix when a pivot magnitude is at or below tolerance and
/// NotPositiveDefinite when a pivot is negative and options demand SPD.
LdlFactor decompose(const SymmetricMatrix& m, const DecomposeOptions& options = {});

struct InvertOptions {
  // One correction step X += X (I - m X) with the residual accumulated in
  // long double. Costs a few times the plain inversion and brings the
  // entries close to working precision for moderately conditioned m.
  bool refine = true;
};

/// Inverse of an SPD matrix via LDL^T, O(N^3).
PrecisionMatrix invert(const SymmetricMatrix& m, const InvertOptions& options = {});
SymmetricMatrix inverse_of(const LdlFactor& factor);
/// One residual-correction step for an approximate inverse x of m.
SymmetricMatrix refine_inverse(const SymmetricMatrix& m, const SymmetricMatrix& x);

/// Removes point k from a precision matrix: the infinite-variance limit of
/// adding g to V(k,k), which collapses to
///   p'(i,j) = p(i,j) - p(i,k) p(k,j) / p(k,k)
/// with row and column k then set to exactly zero. O(N^2), no extra memory
/// for the in-place form.
PrecisionMatrix downdate(const PrecisionMatrix& p, std::size_t k);
void downdate_in_place(PrecisionMatrix& p, std::size_t k);
/// Writes downdate(p, k) into `out`, reusing its storage when sizes match.
void downdate_into(const PrecisionMatrix& p, std::size_t k, PrecisionMatrix& out);

/// sum_ij v_i p(i,j) v_j
double quadratic_form(const PrecisionMatrix& p, std::span<const double> v);
double quadratic_form(const SymmetricMatrix& m, std::span<const double> v);

}  // namespace corrfit

#endif
