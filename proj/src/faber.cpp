#include "faberdyn/faber.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "faberdyn/bessel.hpp"

namespace faberdyn {

namespace {

cplx minus_i_pow(int n) {
  switch (n & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

// Smallest order whose last kept coefficient is below threshold, scanning the
// tail from the top so an accidental near-zero in the oscillatory head is
// never mistaken for convergence.
int trimmed_order(const std::vector<cplx>& c, double threshold) {
  int order = static_cast<int>(c.size());
  while (order > 1 && std::abs(c[order - 2]) < threshold) --order;
  return order;
}

void check_dt(double dt) {
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw InvalidArgument("time step must be finite and >= 0");
}

}  // namespace

bool SpectralBounds::contains(cplx z, double tol) const {
  return z.real() >= re_min - tol && z.real() <= re_max + tol && z.imag() >= im_min - tol &&
         z.imag() <= im_max + tol;
}

SpectralBounds SpectralBounds::inflated(double fraction) const {
  const cplx c = centre();
  const double hr = half_re() * (1.0 + fraction);
  const double hi = half_im() * (1.0 + fraction);
  return {c.real() - hr, c.real() + hr, c.imag() - hi, c.imag() + hi};
}

void SpectralBounds::validate() const {
  if (!std::isfinite(re_min) || !std::isfinite(re_max) || !std::isfinite(im_min) ||
      !std::isfinite(im_max))
    throw InvalidArgument("spectral bounds must be finite");
  if (re_min > re_max || im_min > im_max) throw InvalidArgument("spectral bounds are not ordered");
}

SpectralBounds SpectralBounds::hull(const SpectralBounds& a, const SpectralBounds& b) {
  return {std::min(a.re_min, b.re_min), std::max(a.re_max, b.re_max),
          std::min(a.im_min, b.im_min), std::max(a.im_max, b.im_max)};
}

SpectralBounds SpectralBounds::intersect(const SpectralBounds& a, const SpectralBounds& b) {
  SpectralBounds out{std::max(a.re_min, b.re_min), std::min(a.re_max, b.re_max),
                     std::max(a.im_min, b.im_min), std::min(a.im_max, b.im_max)};
  // Both boxes are rigorous, so an empty overlap can only come from rounding.
  if (out.re_min > out.re_max) out.re_min = out.re_max = 0.5 * (out.re_min + out.re_max);
  if (out.im_min > out.im_max) out.im_min = out.im_max = 0.5 * (out.im_min + out.im_max);
  return out;
}

EllipseParams ellipse_from_bounds(const SpectralBounds& bounds) {
  bounds.validate();
  EllipseParams e;
  e.ell = bounds.half_im();
  e.p = bounds.half_re();
  if (e.ell == 0.0 && e.p == 0.0)
    throw InvalidArgument("ellipse_from_bounds: zero-width spectrum, use the identity propagator");

  const double s = std::cbrt(e.ell * e.ell) + std::cbrt(e.p * e.p);
  e.lambda = 0.5 * std::pow(s, 1.5);
  const double lt = e.ell / e.lambda;
  const double pt = e.p / e.lambda;
  const double lt23 = std::cbrt(lt * lt);
  const double pt23 = std::cbrt(pt * pt);
  double g1 = (pt23 + lt23) * (pt23 * pt23 - lt23 * lt23) / 4.0;
  if (g1 > 1.0 || g1 < -1.0) {
    g1 = std::clamp(g1, -1.0, 1.0);
    e.gamma1_clamped = std::abs(g1) - 1.0 > 1e-12;
  }
  e.gamma1 = g1;
  e.gamma0 = bounds.centre() / e.lambda;
  return e;
}

EllipseParams propagation_ellipse(const SpectralBounds& bounds, double margin) {
  bounds.validate();
  SpectralBounds box = bounds.inflated(margin);
  const double scale = 1.0 + std::abs(box.centre());
  if (box.half_re() <= 1e-12 * scale && box.half_im() <= 1e-12 * scale) {
    const cplx c = box.centre();
    const double w = 1e-6 * scale;
    box = {c.real() - w, c.real() + w, c.imag() - w, c.imag() + w};
  }
  return ellipse_from_bounds(box);
}

FaberCoefficients faber_coefficients_fixed(const EllipseParams& params, double dt, int order) {
  check_dt(dt);
  if (order < 1) throw InvalidArgument("faber coefficients: order must be >= 1");
  if (params.gamma1 < 0.0) return faber_coefficients_contour(params, dt, order);

  const double a = params.lambda * dt;
  const std::vector<double> y = scaled_bessel_sequence(a, params.gamma1, order);
  const cplx phase = std::exp(-kI * a * params.gamma0);

  FaberCoefficients out;
  out.dt = dt;
  out.order = order;
  out.params = params;
  out.coeffs.resize(static_cast<std::size_t>(order));
  for (int n = 0; n < order; ++n) out.coeffs[n] = phase * minus_i_pow(n) * y[n];
  return out;
}

FaberCoefficients faber_coefficients_bessel(const EllipseParams& params, double dt,
                                            double threshold) {
  check_dt(dt);
  if (!(threshold > 0.0 && threshold < 1.0))
    throw InvalidArgument("faber coefficients: threshold must lie in (0, 1)");
  const double a = params.lambda * dt;
  if (a == 0.0) return faber_coefficients_fixed(params, dt, 1);

  // The head may exceed the Taylor weights by exp(|gamma0| a) and, for
  // gamma1 < 0, by the modified-Bessel growth; pad the estimate accordingly.
  const double grow = std::max(0.0, a * params.gamma0.imag()) + std::abs(params.gamma1) * a;
  const int estimate = taylor_tail_order(a, threshold * std::exp(-grow) * 1e-3) + 4;
  FaberCoefficients out = params.gamma1 < 0.0
                              ? faber_coefficients_contour(params, dt, estimate)
                              : faber_coefficients_fixed(params, dt, estimate);
  out.order = trimmed_order(out.coeffs, threshold);
  out.coeffs.resize(static_cast<std::size_t>(out.order));
  return out;
}

FaberCoefficients faber_coefficients_contour(const EllipseParams& params, double dt, int order) {
  check_dt(dt);
  if (order < 1) throw InvalidArgument("faber coefficients: order must be >= 1");
  const unsigned want = static_cast<unsigned>(std::max(4 * order, 32));
  const int samples = static_cast<int>(std::bit_ceil(want));
  const double a = params.lambda * dt;

  FaberCoefficients out;
  out.dt = dt;
  out.order = order;
  out.params = params;
  out.coeffs.assign(static_cast<std::size_t>(order), cplx{0.0, 0.0});

  std::vector<cplx> roots(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) roots[k] = std::polar(1.0, 2.0 * std::numbers::pi * k / samples);

  const unsigned mask = static_cast<unsigned>(samples) - 1u;
  for (int k = 0; k < samples; ++k) {
    const cplx w = roots[k];
    const cplx xi = w + params.gamma0 + params.gamma1 * std::conj(w);
    const cplx f = std::exp(-kI * a * xi);
    // w_k^{-n} = roots[(-k n) mod samples]
    for (int n = 0; n < order; ++n) {
      const unsigned idx = (static_cast<unsigned>(samples) - ((static_cast<unsigned>(k) * n) & mask)) & mask;
      out.coeffs[n] += f * roots[idx];
    }
  }
  for (auto& c : out.coeffs) c /= static_cast<double>(samples);
  return out;
}

CMatrix faber_apply(const LinearMap& op, const EllipseParams& params,
                    const FaberCoefficients& coeffs, const CMatrix& psi) {
  if (psi.rows() != op.dim)
    throw InvalidArgument("faber_apply: state dimension " + std::to_string(psi.rows()) +
                          " does not match operator dimension " + std::to_string(op.dim));
  if (coeffs.order < 1 || static_cast<int>(coeffs.coeffs.size()) < coeffs.order)
    throw InvalidArgument("faber_apply: empty coefficient table");

  const auto& c = coeffs.coeffs;
  const double inv_lambda = 1.0 / params.lambda;
  const cplx g0 = params.gamma0;
  const double g1 = params.gamma1;

  CMatrix result = c[0] * psi;
  if (coeffs.order == 1) return result;

  CMatrix prev = psi;
  CMatrix cur(psi.rows(), psi.cols());
  CMatrix scratch(psi.rows(), psi.cols());

  op.apply(prev, scratch);
  cur.noalias() = inv_lambda * scratch - g0 * prev;
  result.noalias() += c[1] * cur;

  for (int n = 1; n + 1 < coeffs.order; ++n) {
    op.apply(cur, scratch);
    const double back = (n == 1) ? 2.0 * g1 : g1;
    // prev <- (H~ - gamma0) cur - back * prev, then rotate roles.
    prev = inv_lambda * scratch - g0 * cur - back * prev;
    result.noalias() += c[n + 1] * prev;
    prev.swap(cur);
  }
  return result;
}

ChebyshevCoefficients chebyshev_coefficients(double lambda, double dt, double threshold) {
  check_dt(dt);
  if (!(lambda > 0.0)) throw InvalidArgument("chebyshev_coefficients: lambda must be > 0");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw InvalidArgument("chebyshev_coefficients: threshold must lie in (0, 1)");
  const double x = lambda * dt;
  ChebyshevCoefficients out;
  out.dt = dt;
  out.lambda = lambda;
  if (x == 0.0) {
    out.order = 1;
    out.coeffs = {cplx{1.0, 0.0}};
    return out;
  }
  const int estimate = taylor_tail_order(0.5 * x, threshold * 1e-3) + 4;
  const std::vector<double> j = bessel_j_sequence(x, estimate);
  out.coeffs.resize(static_cast<std::size_t>(estimate));
  for (int n = 0; n < estimate; ++n)
    out.coeffs[n] = (n == 0 ? 1.0 : 2.0) * minus_i_pow(n) * j[n];
  out.order = trimmed_order(out.coeffs, threshold);
  out.coeffs.resize(static_cast<std::size_t>(out.order));
  return out;
}

CMatrix chebyshev_apply(const LinearMap& op, double lambda, const ChebyshevCoefficients& coeffs,
                        const CMatrix& psi) {
  if (psi.rows() != op.dim)
    throw InvalidArgument("chebyshev_apply: state dimension does not match operator dimension");
  if (coeffs.order < 1) throw InvalidArgument("chebyshev_apply: empty coefficient table");
  const auto& c = coeffs.coeffs;
  const double inv_lambda = 1.0 / lambda;

  CMatrix result = c[0] * psi;
  if (coeffs.order == 1) return result;

  CMatrix prev = psi;
  CMatrix cur(psi.rows(), psi.cols());
  CMatrix scratch(psi.rows(), psi.cols());
  op.apply(prev, scratch);
  cur.noalias() = inv_lambda * scratch;
  result.noalias() += c[1] * cur;
  for (int n = 1; n + 1 < coeffs.order; ++n) {
    op.apply(cur, scratch);
    prev = (2.0 * inv_lambda) * scratch - prev;
    result.noalias() += c[n + 1] * prev;
    prev.swap(cur);
  }
  return result;
}

FaberPropagator::FaberPropagator(LinearMap op, EllipseParams params, double dt, double threshold)
    : op_(std::move(op)),
      params_(params),
      table_(faber_coefficients_bessel(params, dt, threshold)),
      threshold_(threshold) {}

FaberPropagator::FaberPropagator(LinearMap op, EllipseParams params, double dt, int fixed_order)
    : op_(std::move(op)), params_(params), table_(faber_coefficients_fixed(params, dt, fixed_order)) {}

CMatrix FaberPropagator::step(const CMatrix& psi) const {
  return faber_apply(op_, params_, table_, psi);
}

CMatrix FaberPropagator::advance(const CMatrix& psi, double s) const {
  if (s == table_.dt) return step(psi);
  if (s < 0.0) throw InvalidArgument("FaberPropagator::advance: negative time");
  if (s == 0.0) return psi;
  if (s < table_.dt) {
    const FaberCoefficients partial = faber_coefficients_contour(params_, s, table_.order);
    return faber_apply(op_, params_, partial, psi);
  }
  return faber_apply(op_, params_, faber_coefficients_bessel(params_, s, threshold_), psi);
}

}  // namespace faberdyn
