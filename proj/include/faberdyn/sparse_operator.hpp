#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/SparseCore>

#include "faberdyn/faber.hpp"
#include "faberdyn/types.hpp"

namespace faberdyn {

using Triplet = Eigen::Triplet<cplx>;

/// Immutable square complex matrix in compressed-row storage.
///
/// Copies share the underlying storage, so handing an operator (or the
/// LinearMap it produces) to several threads is safe.
class SparseOperator {
 public:
  using Storage = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

  SparseOperator();
  explicit SparseOperator(Storage m);

  /// Duplicate (row, col) entries are summed; exact zeros are dropped.
  static SparseOperator from_triplets(Index dim, const std::vector<Triplet>& triplets);
  static SparseOperator from_dense(const CMatrix& dense);
  static SparseOperator identity(Index dim);
  static SparseOperator zero(Index dim);

  Index dim() const { return m_->rows(); }
  Index nnz() const { return m_->nonZeros(); }
  const Storage& storage() const { return *m_; }

  /// out = A * in, column-wise. `out` is resized.
  void apply(const CMatrix& in, CMatrix& out) const;
  CVector operator*(const CVector& v) const;
  LinearMap linear_map() const;

  cplx coeff(Index row, Index col) const;
  CMatrix to_dense() const;

  SparseOperator adjoint() const;
  SparseOperator operator+(const SparseOperator& rhs) const;
  SparseOperator operator-(const SparseOperator& rhs) const;
  /// Operator product (this * rhs).
  SparseOperator operator*(const SparseOperator& rhs) const;
  SparseOperator scaled(cplx factor) const;

  /// (A + A^dagger) / 2 and (A - A^dagger) / (2i); both Hermitian.
  SparseOperator hermitian_part() const;
  SparseOperator skew_part() const;

  bool is_hermitian(double tol = 0.0) const;

  /// Plain-text triplet format:
  ///   # faberdyn sparse operator
  ///   <dim> <nnz>
  ///   <row> <col> <re> <im>      (nnz lines, row-major order, %.17g)
  void write_triplets(std::ostream& os) const;
  static SparseOperator read_triplets(std::istream& is);

 private:
  std::shared_ptr<const Storage> m_;
};

/// Bounding box from Gershgorin discs of the Hermitian and skew-Hermitian
/// parts. It contains the numerical range, hence the spectrum.
SpectralBounds gershgorin_bounds(const SparseOperator& op);

/// Propagation ellipse for `op` from gershgorin_bounds.
EllipseParams ellipse_for(const SparseOperator& op, double margin = kDefaultSafetyMargin);

}  // namespace faberdyn
