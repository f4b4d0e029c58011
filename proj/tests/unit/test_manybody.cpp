#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "faberdyn/gaussian.hpp"
#include "faberdyn/manybody.hpp"
#include "faberdyn/oracles.hpp"

using namespace faberdyn;

namespace {

ModelParams xxz(int L, double gamma, double delta) {
  ModelParams p;
  p.L = L;
  p.gamma = gamma;
  p.delta = delta;
  return p;
}

std::shared_ptr<const SectorBasis> sector(int L, int n) {
  return std::make_shared<const SectorBasis>(SectorBasis::sector(L, n));
}

FaberPropagator propagator(const SparseOperator& h, const ModelParams& p, double dt) {
  return FaberPropagator(h.linear_map(), propagation_ellipse(tightened_bounds(h, xxz_analytic_bounds(p))), dt);
}

}  // namespace

TEST(ManyBodyInit, Neel) {
  const auto b = sector(4, 2);
  const ManyBodyState s = neel_state(b);
  EXPECT_EQ(s.amplitudes.size(), 6);
  EXPECT_EQ((s.amplitudes.array() != cplx(0.0, 0.0)).count(), 1);
  EXPECT_EQ(s.amplitudes(b->index_of(0b0101).value()), cplx(1.0, 0.0));
  EXPECT_DOUBLE_EQ(s.norm(), 1.0);
  EXPECT_EQ(magnetization_profile(s), (RVector(4) << 0.5, -0.5, 0.5, -0.5).finished());
  EXPECT_EQ(magnetization_profile(neel_state(std::make_shared<const SectorBasis>(SectorBasis::full(4)))),
            (RVector(4) << 0.5, -0.5, 0.5, -0.5).finished());
  EXPECT_THROW(neel_state(sector(4, 1)), InvalidArgument);
}

TEST(ManyBodyInit, DomainWall) {
  const ManyBodyState s = dw_state(sector(6, 3));
  EXPECT_EQ(magnetization_profile(s), (RVector(6) << 0.5, 0.5, 0.5, -0.5, -0.5, -0.5).finished());
  EXPECT_EQ(spin_current_profile(s, 1.0).norm(), 0.0);
}

TEST(ManyBodyEvolve, StepFidelityAgainstDenseOracle) {
  const ModelParams p = xxz(10, 0.8, 1.0);
  const auto b = sector(10, 5);
  const SparseOperator h = build_xxz_nonreciprocal(p, *b);
  const double dt = 0.05;
  const FaberPropagator prop = propagator(h, p, dt);
  const CMatrix u = dense_expm(h, dt);
  ManyBodyState s = neel_state(b);
  for (int k = 0; k < 20; ++k) {
    const CVector ref = u * s.amplitudes;
    s = evolve_step(s, prop);
    EXPECT_GT(std::abs(ref.dot(s.amplitudes)) / ref.norm(), 1.0 - 1e-10) << k;
    EXPECT_NEAR(s.norm(), 1.0, 1e-14);
  }
  const ManyBodyState t = evolve_step(neel_state(b), h, prop.table(), prop.params());
  EXPECT_GT(std::abs((u * neel_state(b).amplitudes).normalized().dot(t.amplitudes)), 1.0 - 1e-10);
}

TEST(ManyBodyEvolve, HermitianPreservesNorm) {
  const ModelParams p = xxz(10, 0.0, 0.7);
  const auto b = sector(10, 5);
  const SparseOperator h = build_xxz_nonreciprocal(p, *b);
  const FaberPropagator prop = propagator(h, p, 0.1);
  CVector v = neel_state(b).amplitudes;
  for (int k = 0; k < 50; ++k) {
    v = prop.step(v);
    EXPECT_NEAR(v.norm(), 1.0, 1e-12);
  }
}

TEST(ManyBodyEvolve, TotalMagnetisationConserved) {
  const ModelParams p = xxz(10, 0.8, 0.5);
  const auto full = std::make_shared<const SectorBasis>(SectorBasis::full(10));
  const SparseOperator h = build_xxz_nonreciprocal(p, *full);
  const FaberPropagator prop = propagator(h, p, 0.1);
  ManyBodyState s = neel_state(full);
  for (int k = 0; k < 30; ++k) {
    s = evolve_step(s, prop);
    EXPECT_NEAR(magnetization_profile(s).sum(), 0.0, 1e-12);
  }
}

TEST(ManyBodyEvolve, NeelFormsEmergentDomainWall) {
  const ModelParams p = xxz(12, 0.8, 0.0);
  const auto b = sector(12, 6);
  const SparseOperator h = build_xxz_nonreciprocal(p, *b);
  const FaberPropagator prop = propagator(h, p, 0.05);
  ManyBodyState s = neel_state(b);
  std::vector<double> times;
  std::vector<RVector> profiles;
  for (int k = 0; k <= 800; ++k) {
    if (k > 0) s = evolve_step(s, prop);
    if (k % 10 == 0) {
      times.push_back(0.05 * k);
      profiles.push_back(magnetization_profile(s));
    }
  }
  const RVector avg = time_averaged_profile(times, profiles, 20.0, 20.0);
  // up spins pushed to the left edge, down spins to the right edge
  EXPECT_GT(avg.head(3).minCoeff(), 0.4);
  EXPECT_LT(avg.tail(3).maxCoeff(), -0.4);
  EXPECT_GT(avg.head(6).sum(), 2.5);
}

TEST(Profiles, PolarisedStateHasNoCurrent) {
  const auto full = std::make_shared<const SectorBasis>(SectorBasis::full(6));
  const ManyBodyState up = product_state(full, 0b111111);
  EXPECT_EQ(spin_current_profile(up, 1.0).norm(), 0.0);
  EXPECT_EQ(magnetization_profile(up), RVector::Constant(6, 0.5));
}

TEST(BipartiteEntropy, ProductAndBellStates) {
  const auto b = sector(4, 2);
  EXPECT_NEAR(bipartite_entropy(neel_state(b), 2), 0.0, 1e-12);
  ManyBodyState bell{CVector::Zero(b->size()), b};
  // (|up down> + |down up>) on sites 1,2 with sites 0 up and 3 down
  bell.amplitudes(b->index_of(0b0011).value()) = 1.0 / std::sqrt(2.0);
  bell.amplitudes(b->index_of(0b0101).value()) = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(bipartite_entropy(bell, 2), std::numbers::ln2, 1e-12);
  EXPECT_NEAR(bipartite_entropy(bell, 1), 0.0, 1e-12);
  EXPECT_NEAR(bipartite_entropy(bell, 0), 0.0, 1e-12);
  // unnormalised input is handled
  bell.amplitudes *= 3.0;
  EXPECT_NEAR(bipartite_entropy(bell, 2), std::numbers::ln2, 1e-12);
}

TEST(BipartiteEntropy, FullSpaceMatchesSectorAndFreeFermions) {
  // Delta = 0, gamma = 0: spins map to free fermions; a left block entropy is
  // Jordan-Wigner invariant.
  const int L = 10;
  const ModelParams p = xxz(L, 0.0, 0.0);
  const auto b = sector(L, 5);
  const SparseOperator h = build_xxz_nonreciprocal(p, *b);
  const FaberPropagator prop = propagator(h, p, 0.1);
  ManyBodyState s = neel_state(b);

  ModelParams f = p;
  const SparseOperator hf = build_hn_single_particle(f);
  const FaberPropagator pf(hf.linear_map(), propagation_ellipse(tightened_bounds(hf, hn_analytic_bounds(f))), 0.1);
  GaussianState g = init_cdw(L);

  auto full = std::make_shared<const SectorBasis>(SectorBasis::full(L));
  for (int k = 1; k <= 20; ++k) {
    s = evolve_step(s, prop);
    g = evolve_step(g, pf);
    if (k % 5 == 0) {
      const CMatrix C = correlation_matrix(g);
      ManyBodyState sf{CVector::Zero(full->size()), full};
      for (Index i = 0; i < b->size(); ++i) sf.amplitudes(full->index_of(b->state(i)).value()) = s.amplitudes(i);
      for (int cut = 1; cut < L; ++cut) {
        const double ref = entanglement_entropy(C, 0, cut);
        EXPECT_NEAR(bipartite_entropy(s, cut), ref, 1e-8) << k << " " << cut;
        EXPECT_NEAR(bipartite_entropy(sf, cut), ref, 1e-8) << k << " " << cut;
      }
    }
  }
}

TEST(TimeAverage, ConstantSeriesAndSingleSample) {
  const RVector v = (RVector(3) << 1.0, -2.0, 0.5).finished();
  const std::vector<double> t{0.0, 1.0, 2.0, 3.0};
  const std::vector<RVector> prof(4, v);
  EXPECT_LT((time_averaged_profile(t, prof, 0.5, 2.0) - v).norm(), 1e-15);
  EXPECT_LT((time_averaged_profile({0.0}, {v}, 0.0, 0.0) - v).norm(), 1e-15);
  // linear ramp averages to its midpoint
  std::vector<RVector> ramp;
  for (double x : t) ramp.push_back(RVector::Constant(1, x));
  EXPECT_NEAR(time_averaged_profile(t, ramp, 1.0, 2.0)(0), 2.0, 1e-14);
}

TEST(TauStar, RelaxationTime) {
  std::vector<double> t, x;
  for (int k = 0; k <= 1000; ++k) {
    t.push_back(0.01 * k);
    x.push_back(1.0 - std::exp(-t.back()));
  }
  // plateau ~ mean over the last 20 %, approx 0.9999; 95 % reached at about ln 20
  EXPECT_NEAR(estimate_tau_star(t, x), std::log(20.0), 0.02);
}
