#include "faberdyn/bessel.hpp"

#include <algorithm>
#include <cmath>

#include "faberdyn/types.hpp"

namespace faberdyn {

namespace {
constexpr double kRescaleAbove = 1e200;
constexpr double kRescaleBy = 1e-200;
}  // namespace

std::vector<double> scaled_bessel_sequence(double a, double g, int count) {
  if (count < 1) throw InvalidArgument("scaled_bessel_sequence: count must be >= 1");
  if (!(a >= 0.0) || !std::isfinite(a))
    throw InvalidArgument("scaled_bessel_sequence: a must be finite and >= 0");
  if (!(g >= 0.0 && g <= 1.0))
    throw InvalidArgument("scaled_bessel_sequence: g must lie in [0, 1]");

  std::vector<double> out(static_cast<std::size_t>(count), 0.0);
  if (a == 0.0) {
    out[0] = 1.0;
    return out;
  }

  const int start = 2 * (count + static_cast<int>(std::ceil(a))) + 16;
  std::vector<double> y(static_cast<std::size_t>(start) + 2, 0.0);
  y[start] = 1e-30;
  for (int n = start; n >= 1; --n) {
    y[n - 1] = (static_cast<double>(n) / a) * y[n] - g * y[n + 1];
    if (std::abs(y[n - 1]) > kRescaleAbove) {
      for (int k = n - 1; k <= start; ++k) y[k] *= kRescaleBy;
    }
  }

  // Neumann normalisation; g^k y_{2k} = J_{2k}(2 sqrt(g) a).
  double norm = y[0];
  double gk = 1.0;
  for (int k = 1; 2 * k <= start; ++k) {
    gk *= g;
    if (gk == 0.0) break;
    norm += 2.0 * gk * y[2 * k];
  }
  if (norm == 0.0 || !std::isfinite(norm))
    throw NumericalError("scaled_bessel_sequence: normalisation failed");

  for (int n = 0; n < count; ++n) out[n] = y[n] / norm;
  return out;
}

std::vector<double> bessel_j_sequence(double x, int count) {
  return scaled_bessel_sequence(0.5 * x, 1.0, count);
}

int taylor_tail_order(double a, double threshold) {
  if (a <= 0.0) return 1;
  const double log_thr = std::log(threshold);
  double log_term = 0.0;  // log(a^n / n!)
  const double log_a = std::log(a);
  for (int n = 1;; ++n) {
    log_term += log_a - std::log(static_cast<double>(n));
    if (n > a && log_term < log_thr) return n;
  }
}

}  // namespace faberdyn
