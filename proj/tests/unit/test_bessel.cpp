#include <cmath>

#include <gtest/gtest.h>

#include "faberdyn/bessel.hpp"

using namespace faberdyn;

TEST(Bessel, MatchesStdCylBessel) {
  for (double x : {0.1, 1.0, 5.0, 20.0, 60.0}) {
    const auto j = bessel_j_sequence(x, 120);
    for (int n = 0; n < 120; ++n) {
      const double ref = std::cyl_bessel_j(static_cast<double>(n), x);
      EXPECT_NEAR(j[n], ref, 1e-14 + 1e-12 * std::abs(ref)) << "x=" << x << " n=" << n;
    }
  }
}

TEST(Bessel, ZeroArgument) {
  const auto j = bessel_j_sequence(0.0, 5);
  EXPECT_EQ(j[0], 1.0);
  for (int n = 1; n < 5; ++n) EXPECT_EQ(j[n], 0.0);
}

TEST(Bessel, DeepTailKeepsRelativeAccuracy) {
  // J_n(1) for n around 30 is ~1e-41; the downward recurrence should still be exact to rounding.
  const auto j = bessel_j_sequence(1.0, 40);
  for (int n = 20; n < 40; ++n) {
    const double ref = std::cyl_bessel_j(static_cast<double>(n), 1.0);
    EXPECT_NEAR(j[n] / ref, 1.0, 1e-11) << n;
  }
}

TEST(Bessel, TaylorTailOrderGrowsWithArgument) {
  int prev = 0;
  for (double a : {0.5, 1.0, 5.0, 20.0, 100.0}) {
    const int n = taylor_tail_order(a, 1e-16);
    EXPECT_GT(n, prev);
    EXPECT_GT(n, a);
    prev = n;
  }
}
