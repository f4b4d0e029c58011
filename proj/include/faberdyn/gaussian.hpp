#pragma once

#include "faberdyn/faber.hpp"
#include "faberdyn/sparse_operator.hpp"

namespace faberdyn {

/// Particle-number-conserving Gaussian state: the M occupied orbitals are the
/// columns of the L x M matrix U.
struct GaussianState {
  CMatrix U;

  Index sites() const { return U.rows(); }
  Index particles() const { return U.cols(); }
};

/// Fermions on sites 0, 2, 4, ... (M = L/2).
GaussianState init_cdw(int L);
/// Fermions on sites 0 .. L/2-1.
GaussianState init_domain_wall(int L);

/// Replace U by the Q factor of U = QR, with the phases of R's diagonal moved
/// into Q so that R has a real positive diagonal.
void orthonormalize(GaussianState& state);

/// One step i dU/dt = h U with a precomputed coefficient table. h is the
/// single-particle matrix; with `renormalize` the isometry is restored by QR.
GaussianState evolve_step(const GaussianState& state, const SparseOperator& h,
                          const FaberCoefficients& coeffs, const EllipseParams& params,
                          bool renormalize = true);
GaussianState evolve_step(const GaussianState& state, const FaberPropagator& prop,
                          bool renormalize = true);

/// C_nm = <c+_n c_m> = sum_k conj(U_nk) U_mk, i.e. C = (U U^dagger)^T. Only
/// meaningful when U is an isometry.
CMatrix correlation_matrix(const GaussianState& state);

/// Free-fermion entropy of sites [begin, end). Eigenvalues of the restricted
/// correlation block are clipped to [eps, 1 - eps].
double entanglement_entropy(const CMatrix& C, Index begin, Index end, double eps = 1e-12);

/// <n_l> for l = 0 .. L-1.
RVector density_profile(const CMatrix& C);
/// Bond currents I_l = (iJ/2) <c+_{l+1} c_l - c+_l c_{l+1}> = -J Im C_{l+1,l}, l = 0 .. L-2.
RVector current_profile(const CMatrix& C, double J);

/// Particle source/sink T_l in dn_l/dt = -(I_l - I_{l-1}) + T_l for the
/// normalised no-click evolution of the open Hatano-Nelson chain, written in
/// terms of two-point functions by Wick's theorem.
RVector source_term(const CMatrix& C, double gamma);

}  // namespace faberdyn
