#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "faberdyn/models.hpp"
#include "faberdyn/oracles.hpp"
#include "faberdyn/sparse_operator.hpp"
#include "test_util.hpp"

using namespace faberdyn;

TEST(SparseOperator, DenseRoundTripAndArithmetic) {
  std::mt19937_64 gen(7);
  const SparseOperator a = tutil::random_sparse(20, 3, 1.0, gen);
  const SparseOperator b = tutil::random_sparse(20, 2, 1.0, gen);
  const CMatrix da = a.to_dense();
  const CMatrix db = b.to_dense();
  EXPECT_LT((SparseOperator::from_dense(da).to_dense() - da).norm(), 1e-15);
  EXPECT_LT(((a + b).to_dense() - (da + db)).norm(), 1e-13);
  EXPECT_LT(((a - b).to_dense() - (da - db)).norm(), 1e-13);
  EXPECT_LT(((a * b).to_dense() - da * db).norm(), 1e-12);
  EXPECT_LT((a.adjoint().to_dense() - da.adjoint()).norm(), 1e-15);
  EXPECT_LT((a.scaled({0.0, 2.0}).to_dense() - cplx{0.0, 2.0} * da).norm(), 1e-13);
  EXPECT_LT(((a.hermitian_part() + a.skew_part().scaled({0.0, 1.0})).to_dense() - da).norm(), 1e-13);
  EXPECT_TRUE(a.hermitian_part().is_hermitian(1e-14));
  const CVector v = tutil::random_state(20, gen);
  EXPECT_LT((a * v - da * v).norm(), 1e-13);
}

TEST(SparseOperator, DuplicateTripletsAreSummed) {
  const SparseOperator a = SparseOperator::from_triplets(2, {{0, 1, {1.0, 0.0}}, {0, 1, {0.5, 1.0}}});
  EXPECT_EQ(a.coeff(0, 1), cplx(1.5, 1.0));
  EXPECT_EQ(a.coeff(1, 0), cplx(0.0, 0.0));
}

TEST(SparseOperator, RejectsOutOfRange) {
  EXPECT_THROW(SparseOperator::from_triplets(2, {{2, 0, {1.0, 0.0}}}), InvalidArgument);
}

TEST(SparseOperator, TripletTextRoundTrip) {
  std::mt19937_64 gen(8);
  const SparseOperator a = tutil::random_sparse(9, 2, 1.0, gen);
  std::stringstream ss;
  a.write_triplets(ss);
  const SparseOperator b = SparseOperator::read_triplets(ss);
  EXPECT_EQ(b.dim(), a.dim());
  EXPECT_EQ((a.to_dense() - b.to_dense()).norm(), 0.0);
}

TEST(Gershgorin, DiagonalMatrix) {
  const SparseOperator d = SparseOperator::from_triplets(2, {{0, 0, {1.0, 2.0}}, {1, 1, {-3.0, 0.0}}});
  const SpectralBounds b = gershgorin_bounds(d);
  EXPECT_DOUBLE_EQ(b.re_min, -3.0);
  EXPECT_DOUBLE_EQ(b.re_max, 1.0);
  EXPECT_DOUBLE_EQ(b.im_min, 0.0);
  EXPECT_DOUBLE_EQ(b.im_max, 2.0);
}

TEST(Gershgorin, HermitianHasZeroImaginaryWidth) {
  ModelParams mp;
  mp.L = 12;
  const SpectralBounds b = gershgorin_bounds(build_hn_single_particle(mp));
  EXPECT_EQ(b.im_min, 0.0);
  EXPECT_EQ(b.im_max, 0.0);
  EXPECT_NEAR(b.re_min, -b.re_max, 1e-15);
}

TEST(Gershgorin, ContainsHatanoNelsonSpectrum) {
  ModelParams mp;
  mp.L = 64;
  mp.gamma = 0.5;
  for (Boundary bc : {Boundary::Open, Boundary::Periodic}) {
    mp.boundary = bc;
    const SparseOperator h = build_hn_single_particle(mp);
    const SpectralBounds b = gershgorin_bounds(h);
    const DenseEigen ev = dense_eigensolve(h.to_dense(), false);
    for (Index i = 0; i < ev.values.size(); ++i) EXPECT_TRUE(b.contains(ev.values(i), 1e-12));
  }
}

TEST(Gershgorin, ContainsRandomSpectra) {
  std::mt19937_64 gen(99);
  for (int k = 0; k < 10; ++k) {
    const SparseOperator a = tutil::random_sparse(40, 4, 1.0, gen);
    const SpectralBounds b = gershgorin_bounds(a);
    const DenseEigen ev = dense_eigensolve(a.to_dense(), false);
    for (Index i = 0; i < ev.values.size(); ++i) EXPECT_TRUE(b.contains(ev.values(i), 1e-12));
  }
}

TEST(SpectralBounds, HullIntersectValidate) {
  const SpectralBounds a{-1, 1, -1, 1};
  const SpectralBounds b{0, 2, -0.5, 3};
  const SpectralBounds h = SpectralBounds::hull(a, b);
  EXPECT_EQ(h.re_min, -1);
  EXPECT_EQ(h.im_max, 3);
  const SpectralBounds i = SpectralBounds::intersect(a, b);
  EXPECT_EQ(i.re_min, 0);
  EXPECT_EQ(i.im_min, -0.5);
  EXPECT_EQ(i.im_max, 1);
  EXPECT_THROW((SpectralBounds{1, 0, 0, 0}.validate()), InvalidArgument);
  const SpectralBounds f = a.inflated(0.1);
  EXPECT_NEAR(f.re_max, 1.1, 1e-15);
}
