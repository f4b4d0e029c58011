#pragma once

#include <vector>

#include "faberdyn/types.hpp"

namespace faberdyn {

inline constexpr double kDefaultThreshold = 1e-16;
inline constexpr double kDefaultSafetyMargin = 0.05;

/// Axis-aligned box containing the spectrum (and, for the bounds produced
/// by this library, the numerical range) of an operator.
struct SpectralBounds {
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;

  double half_re() const { return 0.5 * (re_max - re_min); }
  double half_im() const { return 0.5 * (im_max - im_min); }
  cplx centre() const { return {0.5 * (re_max + re_min), 0.5 * (im_max + im_min)}; }
  bool contains(cplx z, double tol = 0.0) const;

  /// Half-widths scaled by (1 + fraction) about the centre.
  SpectralBounds inflated(double fraction) const;
  /// Throws InvalidArgument unless finite and ordered.
  void validate() const;

  /// Smallest box holding both.
  static SpectralBounds hull(const SpectralBounds& a, const SpectralBounds& b);
  /// Overlap of two boxes that are both known to contain the spectrum.
  static SpectralBounds intersect(const SpectralBounds& a, const SpectralBounds& b);
};

/// Conformal map xi(w) = w + gamma0 + gamma1 / w of the exterior of the unit
/// disk onto the exterior of an ellipse, in units where H is divided by lambda.
struct EllipseParams {
  cplx gamma0{0.0, 0.0};
  double gamma1 = 1.0;
  double lambda = 1.0;
  double ell = 0.0;  // imaginary half-spread (physical units)
  double p = 0.0;    // real half-spread (physical units)
  bool gamma1_clamped = false;
};

struct FaberCoefficients {
  double dt = 0.0;
  int order = 0;
  std::vector<cplx> coeffs;
  EllipseParams params;
};

struct ChebyshevCoefficients {
  double dt = 0.0;
  int order = 0;
  std::vector<cplx> coeffs;
  double lambda = 1.0;
};

/// Minimal-capacity ellipse through the corners of the bounding box.
///
///   lambda = (ell^{2/3} + p^{2/3})^{3/2} / 2
///   gamma1 = (p~^{2/3} + ell~^{2/3}) (p~^{4/3} - ell~^{4/3}) / 4,  x~ = x / lambda
///
/// gamma1 lies in [-1, 1]: 1 is the real segment [-2, 2], 0 the unit circle,
/// -1 the imaginary segment. Throws InvalidArgument for a single-point box.
EllipseParams ellipse_from_bounds(const SpectralBounds& bounds);

/// ellipse_from_bounds after inflating the box by `margin`. A single-point box
/// is widened to a small disc so scalar operators still propagate.
EllipseParams propagation_ellipse(const SpectralBounds& bounds,
                                  double margin = kDefaultSafetyMargin);

/// c_n = exp(-i lambda dt gamma0) (-i / sqrt(gamma1))^n J_n(2 sqrt(gamma1) lambda dt),
/// truncated at the first order whose last coefficient is below `threshold`.
/// gamma1 < 0 is delegated to the contour quadrature.
FaberCoefficients faber_coefficients_bessel(const EllipseParams& params, double dt,
                                            double threshold = kDefaultThreshold);

/// Same series with a caller-fixed number of terms.
FaberCoefficients faber_coefficients_fixed(const EllipseParams& params, double dt, int order);

/// c_n = (1 / 2 pi i) \oint_{|w|=1} exp(-i lambda dt xi(w)) w^{-n-1} dw by a
/// uniform-grid DFT with a power-of-two sample count >= 4 * order.
FaberCoefficients faber_coefficients_contour(const EllipseParams& params, double dt, int order);

/// sum_n c_n F_n(H / lambda) psi via the three-term Faber recurrence. `op`
/// applies the physical (unscaled) operator. Columns of `psi` are propagated
/// independently.
CMatrix faber_apply(const LinearMap& op, const EllipseParams& params,
                    const FaberCoefficients& coeffs, const CMatrix& psi);

/// Hermitian warm-up: c_n = (2 / (1 + delta_{n0})) (-i)^n J_n(lambda dt).
ChebyshevCoefficients chebyshev_coefficients(double lambda, double dt,
                                             double threshold = kDefaultThreshold);

CMatrix chebyshev_apply(const LinearMap& op, double lambda, const ChebyshevCoefficients& coeffs,
                        const CMatrix& psi);

/// Fixed-step propagator bundling an operator with its ellipse and a cached
/// coefficient table. Partial steps (s < dt) use contour coefficients of the
/// same order.
class FaberPropagator {
 public:
  FaberPropagator(LinearMap op, EllipseParams params, double dt,
                  double threshold = kDefaultThreshold);
  /// Fixed-order policy.
  FaberPropagator(LinearMap op, EllipseParams params, double dt, int fixed_order);

  CMatrix step(const CMatrix& psi) const;
  CMatrix advance(const CMatrix& psi, double s) const;

  double dt() const { return table_.dt; }
  int order() const { return table_.order; }
  const EllipseParams& params() const { return params_; }
  const FaberCoefficients& table() const { return table_; }
  const LinearMap& op() const { return op_; }

 private:
  LinearMap op_;
  EllipseParams params_;
  FaberCoefficients table_;
  double threshold_ = kDefaultThreshold;
};

}  // namespace faberdyn
