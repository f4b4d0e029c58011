#pragma once

#include <random>
#include <vector>

#include "faberdyn/sparse_operator.hpp"

namespace faberdyn::tutil {

// Random sparse complex matrix with about `per_row` off-diagonal entries per
// row, entries uniform in the unit square scaled by `scale`.
inline SparseOperator random_sparse(Index n, int per_row, double scale, std::mt19937_64& gen,
                                    double skew = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<Index> col(0, n - 1);
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) {
    t.emplace_back(i, i, cplx{scale * u(gen), skew * scale * u(gen)});
    for (int k = 0; k < per_row; ++k) t.emplace_back(i, col(gen), cplx{scale * u(gen), skew * scale * u(gen)});
  }
  return SparseOperator::from_triplets(n, t);
}

inline CVector random_state(Index n, std::mt19937_64& gen) {
  std::normal_distribution<double> g;
  CVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = cplx{g(gen), g(gen)};
  return v / v.norm();
}

// 1 - |<a|b>| / (|a| |b|)
inline double infidelity(const CVector& a, const CVector& b) {
  return 1.0 - std::abs(a.dot(b)) / (a.norm() * b.norm());
}

}  // namespace faberdyn::tutil
