#pragma once

#include <vector>

namespace faberdyn {

/// Scaled Bessel sequence y_n = g^{-n/2} J_n(2 sqrt(g) a) for n = 0..count-1.
///
/// Computed by Miller's backward recurrence
///   y_{n-1} = (n / a) y_n - g y_{n+1}
/// normalised with the Neumann sum y_0 + 2 sum_k g^k y_{2k} = 1. The scaling
/// keeps the recurrence regular at g = 0, where it reduces to the Taylor
/// weights a^n / n!. Requires a >= 0 and g in [0, 1].
std::vector<double> scaled_bessel_sequence(double a, double g, int count);

/// J_n(x) for n = 0..count-1 and x >= 0.
std::vector<double> bessel_j_sequence(double x, int count);

/// Smallest n > a with a^n / n! below `threshold` (log-space estimate).
int taylor_tail_order(double a, double threshold);

}  // namespace faberdyn
