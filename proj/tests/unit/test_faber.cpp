#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "faberdyn/bessel.hpp"
#include "faberdyn/faber.hpp"
#include "faberdyn/models.hpp"
#include "faberdyn/oracles.hpp"
#include "test_util.hpp"

using namespace faberdyn;

namespace {

EllipseParams params_with(double gamma1, double lambda, cplx gamma0 = {0.0, 0.0}) {
  EllipseParams e;
  e.gamma0 = gamma0;
  e.gamma1 = gamma1;
  e.lambda = lambda;
  return e;
}

}  // namespace

TEST(Ellipse, LambdaForDegenerateBox) {
  // half-widths 0 and 2
  const EllipseParams e = ellipse_from_bounds({0.0, 0.0, -2.0, 2.0});
  EXPECT_NEAR(e.lambda, 1.0, 1e-15);
  const EllipseParams f = ellipse_from_bounds({-2.0, 2.0, 0.0, 0.0});
  EXPECT_NEAR(f.lambda, 1.0, 1e-15);
  EXPECT_NEAR(f.gamma1, 1.0, 1e-14);
}

TEST(Ellipse, LambdaForSquareBox) {
  for (double l : {0.5, 1.0, 3.0}) {
    const EllipseParams e = ellipse_from_bounds({-l, l, -l, l});
    EXPECT_NEAR(e.lambda, std::sqrt(2.0) * l, 1e-13 * l);
    EXPECT_NEAR(e.gamma1, 0.0, 1e-14);
  }
}

TEST(Ellipse, CentreAndRange) {
  const EllipseParams e = ellipse_from_bounds({1.0, 5.0, -1.0, 0.0});
  EXPECT_NEAR(std::abs(e.gamma0 * e.lambda - cplx(3.0, -0.5)), 0.0, 1e-14);
  EXPECT_LE(e.gamma1, 1.0);
  EXPECT_GE(e.gamma1, -1.0);
}

TEST(Ellipse, PropagationEllipseEnclosesInflatedBox) {
  const SpectralBounds b{-3.0, 1.0, -0.5, 0.2};
  const EllipseParams e = propagation_ellipse(b);
  // ellipse semi-axes lambda(1 +- gamma1) around lambda gamma0
  const double a = e.lambda * (1.0 + e.gamma1);
  const double c = e.lambda * std::abs(1.0 - e.gamma1);
  const cplx z0 = e.lambda * e.gamma0;
  for (cplx z : {cplx(-3, -0.5), cplx(-3, 0.2), cplx(1, -0.5), cplx(1, 0.2)}) {
    const cplx d = z - z0;
    EXPECT_LE(std::pow(d.real() / a, 2) + std::pow(d.imag() / c, 2), 1.0 + 1e-12);
  }
}

TEST(FaberCoefficients, ZeroStep) {
  const FaberCoefficients c = faber_coefficients_bessel(params_with(0.5, 2.0, {0.3, -0.1}), 0.0);
  ASSERT_GE(c.order, 1);
  EXPECT_NEAR(std::abs(c.coeffs[0] - 1.0), 0.0, 1e-15);
  for (int n = 1; n < c.order; ++n) EXPECT_EQ(std::abs(c.coeffs[n]), 0.0);
  const FaberCoefficients k = faber_coefficients_contour(params_with(-0.5, 2.0), 0.0, 8);
  EXPECT_NEAR(std::abs(k.coeffs[0] - 1.0), 0.0, 1e-15);
  for (int n = 1; n < 8; ++n) EXPECT_NEAR(std::abs(k.coeffs[n]), 0.0, 1e-15);
}

TEST(FaberCoefficients, ClosedFormBessel) {
  const EllipseParams e = params_with(0.64, 3.0, {0.2, -0.4});
  const double dt = 0.7;
  const FaberCoefficients c = faber_coefficients_fixed(e, dt, 20);
  const auto j = bessel_j_sequence(2.0 * 0.8 * 3.0 * dt, 20);
  const cplx phase = std::exp(cplx{0.0, -3.0 * dt} * e.gamma0);
  for (int n = 0; n < 20; ++n) {
    const cplx ref = phase * std::pow(cplx{0.0, -1.0 / 0.8}, n) * j[n];
    EXPECT_NEAR(std::abs(c.coeffs[n] - ref), 0.0, 1e-15 + 1e-13 * std::abs(ref)) << n;
  }
}

TEST(FaberCoefficients, ContourAgreesWithBessel) {
  for (double g1 : {1e-3, 0.1, 0.5, 1.0}) {
    for (double ldt : {0.5, 5.0, 20.0}) {
      const EllipseParams e = params_with(g1, 1.0, {0.1, -0.3});
      const FaberCoefficients b = faber_coefficients_bessel(e, ldt, 1e-18);
      const FaberCoefficients k = faber_coefficients_contour(e, ldt, b.order);
      // Round-off is set by the largest coefficient (|c_n| reaches ~1e5 at small g1).
      double scale = 0.0;
      for (const cplx& c : b.coeffs) scale = std::max(scale, std::abs(c));
      for (int n = 0; n < b.order; ++n)
        EXPECT_NEAR(std::abs(b.coeffs[n] - k.coeffs[n]), 0.0, 1e-13 * std::max(scale, 1.0))
            << "g1=" << g1 << " ldt=" << ldt << " n=" << n;
    }
  }
}

TEST(FaberCoefficients, ContourTaylorLimit) {
  const cplx g0{0.3, -0.2};
  const double ldt = 2.5;
  const FaberCoefficients k = faber_coefficients_contour(params_with(0.0, 1.0, g0), ldt, 30);
  const cplx phase = std::exp(cplx{0.0, -ldt} * g0);
  double fact = 1.0;
  for (int n = 0; n < 30; ++n) {
    if (n > 0) fact *= n;
    const cplx ref = phase * std::pow(cplx{0.0, -ldt}, n) / fact;
    EXPECT_NEAR(std::abs(k.coeffs[n] - ref), 0.0, 1e-14) << n;
  }
}

TEST(FaberCoefficients, OrderGrowsWithLambdaDt) {
  int prev = 0;
  for (double ldt : {0.1, 1.0, 5.0, 20.0, 80.0}) {
    const int order = faber_coefficients_bessel(params_with(0.5, 1.0), ldt).order;
    EXPECT_GT(order, prev) << ldt;
    prev = order;
  }
}

TEST(FaberCoefficients, TailFollowsTaylorBoundNearCircle) {
  // gamma1 -> 0: c_n -> (lambda dt)^n / n!
  const double ldt = 5.0;
  const FaberCoefficients c = faber_coefficients_bessel(params_with(1e-4, 1.0), ldt, 1e-30);
  double lf = 0.0;
  for (int n = 1; n < c.order; ++n) {
    lf += std::log(ldt) - std::log(static_cast<double>(n));
    if (n > 2 * ldt && std::abs(c.coeffs[n]) > 1e-250) {
      const double ratio = std::abs(c.coeffs[n]) / std::exp(lf);
      EXPECT_GT(ratio, 0.5) << n;
      EXPECT_LT(ratio, 2.0) << n;
    }
  }
}

TEST(ChebyshevCoefficients, FirstCoefficient) {
  for (double ldt : {0.3, 1.0, 7.0}) {
    const ChebyshevCoefficients c = chebyshev_coefficients(1.0, ldt);
    EXPECT_NEAR(std::abs(c.coeffs[1] - cplx{0.0, -2.0 * std::cyl_bessel_j(1.0, ldt)}), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.coeffs[0] - std::cyl_bessel_j(0.0, ldt)), 0.0, 1e-15);
  }
  const ChebyshevCoefficients z = chebyshev_coefficients(3.0, 0.0);
  EXPECT_NEAR(std::abs(z.coeffs[0] - 1.0), 0.0, 1e-15);
  for (int n = 1; n < z.order; ++n) EXPECT_EQ(std::abs(z.coeffs[n]), 0.0);
}

TEST(ChebyshevCoefficients, OrderRoughlyLinear) {
  const int a = chebyshev_coefficients(1.0, 10.0).order;
  const int b = chebyshev_coefficients(1.0, 100.0).order;
  const int c = chebyshev_coefficients(1.0, 1000.0).order;
  const double r1 = static_cast<double>(b) / a;
  const double r2 = static_cast<double>(c) / b;
  EXPECT_GT(r2, 5.0);
  EXPECT_LT(r2, 12.0);
  EXPECT_GT(r1, 2.0);
}

TEST(FaberApply, ZeroOperatorIsIdentity) {
  const SparseOperator z = SparseOperator::zero(6);
  const EllipseParams e = propagation_ellipse(gershgorin_bounds(z));
  std::mt19937_64 gen(3);
  const CVector v = tutil::random_state(6, gen);
  for (double dt : {0.1, 1.0, 10.0}) {
    const FaberPropagator p(z.linear_map(), e, dt);
    EXPECT_LT((p.step(v) - v).norm(), 1e-14) << dt;
  }
}

TEST(FaberApply, HatanoNelsonMatchesDenseExponential) {
  ModelParams mp;
  mp.L = 6;
  mp.gamma = 0.5;
  const SparseOperator h = build_hn_single_particle(mp);
  const EllipseParams e = ellipse_for(h);
  const double dt = 0.5;
  const FaberCoefficients c = faber_coefficients_bessel(e, dt);
  const CMatrix out = faber_apply(h.linear_map(), e, c, CMatrix::Identity(6, 6));
  const CMatrix ref = dense_expm(h, dt);
  EXPECT_LT((out - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FaberApply, ManyBodySectorMatchesDenseExponential) {
  ModelParams mp;
  mp.L = 10;
  mp.gamma = 0.8;
  mp.delta = 1.0;
  const SectorBasis basis = SectorBasis::sector(10, 5);
  const SparseOperator h = build_xxz_nonreciprocal(mp, basis);
  const EllipseParams e = propagation_ellipse(tightened_bounds(h, xxz_analytic_bounds(mp)));
  std::mt19937_64 gen(11);
  const CVector v = tutil::random_state(h.dim(), gen);
  const FaberPropagator p(h.linear_map(), e, 0.1);
  const CVector f = p.step(v);
  const CVector o = dense_expm(h, 0.1) * v;
  EXPECT_LT(tutil::infidelity(f, o), 1e-10);
  EXPECT_LT((f - o).norm() / o.norm(), 1e-10);
}

TEST(FaberApply, RandomOperatorsMatchDenseExponential) {
  std::mt19937_64 gen(2024);
  for (int k = 0; k < 8; ++k) {
    const Index n = 16 + 16 * k;
    const SparseOperator a = tutil::random_sparse(n, 3, 0.5, gen, k % 2 ? 1.0 : 0.1);
    const CVector v = tutil::random_state(n, gen);
    const double dt = 0.2 + 0.1 * k;
    const FaberPropagator p(a.linear_map(), ellipse_for(a), dt);
    const CVector f = p.step(v);
    const CVector o = dense_expm(a, dt) * v;
    EXPECT_LT((f / f.norm() - o / o.norm()).norm(), 1e-10) << k;
  }
}

TEST(FaberApply, NegativeGamma1UsesContourAndIsAccurate) {
  // Spectrum elongated along the imaginary axis.
  std::vector<Triplet> t;
  for (Index i = 0; i < 12; ++i) t.emplace_back(i, i, cplx{0.05 * i, -1.0 + 0.15 * i});
  const SparseOperator a = SparseOperator::from_triplets(12, t);
  const EllipseParams e = ellipse_for(a);
  ASSERT_LT(e.gamma1, 0.0);
  std::mt19937_64 gen(5);
  const CVector v = tutil::random_state(12, gen);
  const FaberPropagator p(a.linear_map(), e, 0.7);
  EXPECT_LT((p.step(v) - dense_expm(a, 0.7) * v).norm(), 1e-12);
}

TEST(FaberApply, AdvanceSplitsStep) {
  ModelParams mp;
  mp.L = 8;
  mp.gamma = 0.3;
  const SparseOperator h = build_hn_single_particle(mp);
  const FaberPropagator p(h.linear_map(), ellipse_for(h), 0.2);
  std::mt19937_64 gen(9);
  const CVector v = tutil::random_state(8, gen);
  const CMatrix two = p.advance(p.advance(v, 0.13), 0.07);
  EXPECT_LT((two - p.step(v)).norm(), 1e-13);
  EXPECT_THROW(p.advance(v, -0.1), InvalidArgument);
}

TEST(FaberApply, HermitianReducesToChebyshev) {
  ModelParams mp;
  mp.L = 8;
  mp.gamma = 0.0;
  const SparseOperator h = build_hn_single_particle(mp);
  // symmetric real spectrum in [-1, 1]: lambda = 1 centred
  const EllipseParams e = ellipse_from_bounds({-1.0, 1.0, 0.0, 0.0});
  std::mt19937_64 gen(1);
  const CVector v = tutil::random_state(8, gen);
  const double dt = 1.0;
  const CMatrix f = faber_apply(h.linear_map(), e, faber_coefficients_bessel(e, dt), v);
  const CMatrix c = chebyshev_apply(h.linear_map(), 1.0, chebyshev_coefficients(1.0, dt), v);
  EXPECT_LT((f - c).norm(), 1e-12);
  EXPECT_LT((c - dense_expm(h, dt) * v).norm(), 1e-12);
  const CMatrix id = chebyshev_apply(h.linear_map(), 1.0, chebyshev_coefficients(1.0, 0.0), v);
  EXPECT_LT((id - v).norm(), 1e-15);
}

TEST(FaberPropagator, FixedOrderAndValidation) {
  const SparseOperator id = SparseOperator::identity(4);
  const EllipseParams e = propagation_ellipse(gershgorin_bounds(id));
  const FaberPropagator p(id.linear_map(), e, 0.5, 12);
  EXPECT_EQ(p.order(), 12);
  EXPECT_THROW(FaberPropagator(id.linear_map(), e, -0.5), InvalidArgument);
  EXPECT_THROW(FaberPropagator(id.linear_map(), e, 0.5, 0), InvalidArgument);
}
