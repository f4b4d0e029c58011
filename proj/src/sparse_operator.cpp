#include "faberdyn/sparse_operator.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace faberdyn {

namespace {

std::shared_ptr<const SparseOperator::Storage> share(SparseOperator::Storage m) {
  m.prune(cplx{0.0, 0.0}, 0.0);
  m.makeCompressed();
  return std::make_shared<const SparseOperator::Storage>(std::move(m));
}

void require_same_dim(const SparseOperator& a, const SparseOperator& b, const char* what) {
  if (a.dim() != b.dim())
    throw InvalidArgument(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) +
                          " vs " + std::to_string(b.dim()) + ")");
}

// Gershgorin interval [min_i (a_ii - r_i), max_i (a_ii + r_i)] of a Hermitian matrix.
std::pair<double, double> hermitian_gershgorin(const SparseOperator::Storage& m) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Index i = 0; i < m.outerSize(); ++i) {
    double diag = 0.0;
    double radius = 0.0;
    for (SparseOperator::Storage::InnerIterator it(m, i); it; ++it) {
      if (it.col() == i)
        diag = it.value().real();
      else
        radius += std::abs(it.value());
    }
    lo = std::min(lo, diag - radius);
    hi = std::max(hi, diag + radius);
  }
  if (m.rows() == 0) return {0.0, 0.0};
  return {lo, hi};
}

}  // namespace

SparseOperator::SparseOperator() : m_(share(Storage(0, 0))) {}

SparseOperator::SparseOperator(Storage m) : m_(share(std::move(m))) {
  if (m_->rows() != m_->cols()) throw InvalidArgument("SparseOperator must be square");
}

SparseOperator SparseOperator::from_triplets(Index dim, const std::vector<Triplet>& triplets) {
  Storage m(dim, dim);
  for (const auto& t : triplets) {
    if (t.row() < 0 || t.row() >= dim || t.col() < 0 || t.col() >= dim)
      throw InvalidArgument("SparseOperator::from_triplets: index out of range");
  }
  m.setFromTriplets(triplets.begin(), triplets.end());
  return SparseOperator(std::move(m));
}

SparseOperator SparseOperator::from_dense(const CMatrix& dense) {
  if (dense.rows() != dense.cols()) throw InvalidArgument("SparseOperator::from_dense: not square");
  return SparseOperator(Storage(dense.sparseView(cplx{0.0, 0.0}, 0.0)));
}

SparseOperator SparseOperator::identity(Index dim) {
  Storage m(dim, dim);
  m.setIdentity();
  return SparseOperator(std::move(m));
}

SparseOperator SparseOperator::zero(Index dim) { return SparseOperator(Storage(dim, dim)); }

void SparseOperator::apply(const CMatrix& in, CMatrix& out) const {
  if (in.rows() != dim())
    throw InvalidArgument("SparseOperator::apply: input has " + std::to_string(in.rows()) +
                          " rows, operator dimension is " + std::to_string(dim()));
  out.resize(in.rows(), in.cols());
  out.noalias() = (*m_) * in;
}

CVector SparseOperator::operator*(const CVector& v) const {
  if (v.size() != dim()) throw InvalidArgument("SparseOperator: vector dimension mismatch");
  return (*m_) * v;
}

LinearMap SparseOperator::linear_map() const {
  auto storage = m_;
  return LinearMap{dim(), [storage](const CMatrix& in, CMatrix& out) {
                     out.resize(in.rows(), in.cols());
                     out.noalias() = (*storage) * in;
                   }};
}

cplx SparseOperator::coeff(Index row, Index col) const { return m_->coeff(row, col); }

CMatrix SparseOperator::to_dense() const { return CMatrix(*m_); }

SparseOperator SparseOperator::adjoint() const { return SparseOperator(Storage(m_->adjoint())); }

SparseOperator SparseOperator::operator+(const SparseOperator& rhs) const {
  require_same_dim(*this, rhs, "SparseOperator::operator+");
  return SparseOperator(Storage(*m_ + *rhs.m_));
}

SparseOperator SparseOperator::operator-(const SparseOperator& rhs) const {
  require_same_dim(*this, rhs, "SparseOperator::operator-");
  return SparseOperator(Storage(*m_ - *rhs.m_));
}

SparseOperator SparseOperator::operator*(const SparseOperator& rhs) const {
  require_same_dim(*this, rhs, "SparseOperator::operator*");
  return SparseOperator(Storage(*m_ * *rhs.m_));
}

SparseOperator SparseOperator::scaled(cplx factor) const {
  return SparseOperator(Storage(factor * (*m_)));
}

SparseOperator SparseOperator::hermitian_part() const {
  return SparseOperator(Storage(0.5 * (*m_ + Storage(m_->adjoint()))));
}

SparseOperator SparseOperator::skew_part() const {
  return SparseOperator(Storage(cplx{0.0, -0.5} * (*m_ - Storage(m_->adjoint()))));
}

bool SparseOperator::is_hermitian(double tol) const {
  const Storage diff = *m_ - Storage(m_->adjoint());
  for (Index k = 0; k < diff.outerSize(); ++k)
    for (Storage::InnerIterator it(diff, k); it; ++it)
      if (std::abs(it.value()) > tol) return false;
  return true;
}

void SparseOperator::write_triplets(std::ostream& os) const {
  os << "# faberdyn sparse operator\n" << dim() << ' ' << nnz() << '\n';
  os << std::setprecision(17);
  for (Index r = 0; r < m_->outerSize(); ++r)
    for (Storage::InnerIterator it(*m_, r); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag()
         << '\n';
}

SparseOperator SparseOperator::read_triplets(std::istream& is) {
  std::string line;
  auto next_data_line = [&]() -> bool {
    while (std::getline(is, line)) {
      if (!line.empty() && line[0] != '#') return true;
    }
    return false;
  };
  if (!next_data_line()) throw InvalidArgument("read_triplets: missing header");
  std::istringstream header(line);
  Index dim = 0;
  Index count = 0;
  if (!(header >> dim >> count) || dim < 0 || count < 0)
    throw InvalidArgument("read_triplets: malformed header");
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(count));
  for (Index k = 0; k < count; ++k) {
    if (!next_data_line()) throw InvalidArgument("read_triplets: truncated entry list");
    std::istringstream row(line);
    Index r = 0;
    Index c = 0;
    double re = 0.0;
    double im = 0.0;
    if (!(row >> r >> c >> re >> im)) throw InvalidArgument("read_triplets: malformed entry");
    triplets.emplace_back(r, c, cplx{re, im});
  }
  return from_triplets(dim, triplets);
}

SpectralBounds gershgorin_bounds(const SparseOperator& op) {
  const auto [re_lo, re_hi] = hermitian_gershgorin(op.hermitian_part().storage());
  const auto [im_lo, im_hi] = hermitian_gershgorin(op.skew_part().storage());
  return {re_lo, re_hi, im_lo, im_hi};
}

EllipseParams ellipse_for(const SparseOperator& op, double margin) {
  return propagation_ellipse(gershgorin_bounds(op), margin);
}

}  // namespace faberdyn
