#include "faberdyn/gaussian.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace faberdyn {

namespace {

void require_even(int L) {
  if (L < 2 || L % 2 != 0) throw InvalidArgument("Gaussian initial states need an even L >= 2");
}

}  // namespace

GaussianState init_cdw(int L) {
  require_even(L);
  GaussianState s;
  s.U = CMatrix::Zero(L, L / 2);
  for (int k = 0; k < L / 2; ++k) s.U(2 * k, k) = 1.0;
  return s;
}

GaussianState init_domain_wall(int L) {
  require_even(L);
  GaussianState s;
  s.U = CMatrix::Zero(L, L / 2);
  for (int k = 0; k < L / 2; ++k) s.U(k, k) = 1.0;
  return s;
}

void orthonormalize(GaussianState& state) {
  const Index L = state.sites();
  const Index M = state.particles();
  if (M == 0) return;
  Eigen::HouseholderQR<CMatrix> qr(state.U);
  CMatrix Q = qr.householderQ() * CMatrix::Identity(L, M);
  const auto& R = qr.matrixQR();
  for (Index k = 0; k < M; ++k) {
    const cplx d = R(k, k);
    const double mag = std::abs(d);
    if (!(mag > 0.0) || !std::isfinite(mag))
      throw NumericalError("orthonormalize: orbitals became linearly dependent");
    Q.col(k) *= d / mag;
  }
  state.U = std::move(Q);
}

GaussianState evolve_step(const GaussianState& state, const SparseOperator& h,
                          const FaberCoefficients& coeffs, const EllipseParams& params,
                          bool renormalize) {
  if (h.dim() != state.sites())
    throw InvalidArgument("gaussian evolve_step: h is not L x L");
  GaussianState out;
  out.U = faber_apply(h.linear_map(), params, coeffs, state.U);
  if (renormalize) orthonormalize(out);
  return out;
}

GaussianState evolve_step(const GaussianState& state, const FaberPropagator& prop,
                          bool renormalize) {
  if (prop.op().dim != state.sites())
    throw InvalidArgument("gaussian evolve_step: propagator is not L x L");
  GaussianState out;
  out.U = prop.step(state.U);
  if (renormalize) orthonormalize(out);
  return out;
}

CMatrix correlation_matrix(const GaussianState& state) {
  return (state.U * state.U.adjoint()).transpose();
}

double entanglement_entropy(const CMatrix& C, Index begin, Index end, double eps) {
  if (begin < 0 || end > C.rows() || begin > end)
    throw InvalidArgument("entanglement_entropy: cut outside [0, L)");
  const Index n = end - begin;
  if (n == 0) return 0.0;
  const CMatrix block = C.block(begin, begin, n, n);
  const CMatrix herm = 0.5 * (block + block.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("entanglement_entropy: eigensolver failed");
  double s = 0.0;
  for (Index k = 0; k < n; ++k) {
    const double x = std::clamp(es.eigenvalues()(k), eps, 1.0 - eps);
    s -= x * std::log(x) + (1.0 - x) * std::log(1.0 - x);
  }
  return s;
}

RVector density_profile(const CMatrix& C) { return C.diagonal().real(); }

RVector current_profile(const CMatrix& C, double J) {
  const Index L = C.rows();
  RVector I = RVector::Zero(std::max<Index>(L - 1, 0));
  for (Index l = 0; l + 1 < L; ++l) I(l) = -J * C(l + 1, l).imag();
  return I;
}

RVector source_term(const CMatrix& C, double gamma) {
  const Index L = C.rows();
  RVector T = RVector::Zero(L);
  if (gamma == 0.0) return T;
  // Skew-Hermitian generator S = (i gamma / 2) sum_n (c+_n c_{n+1} - c+_{n+1} c_n),
  // T_l = <{S, n_l}> - 2 <S><n_l>. Wick's theorem gives
  //   T_l = 2 Re sum_b s_lb C_lb - 2 sum_ab s_ab C_al C_lb.
  const cplx s_fwd{0.0, 0.5 * gamma};
  for (Index l = 0; l < L; ++l) {
    cplx local{0.0, 0.0};
    if (l + 1 < L) local += s_fwd * C(l, l + 1);
    if (l > 0) local -= s_fwd * C(l, l - 1);
    cplx pair{0.0, 0.0};
    for (Index n = 0; n + 1 < L; ++n)
      pair += s_fwd * (C(n, l) * C(l, n + 1) - C(n + 1, l) * C(l, n));
    T(l) = 2.0 * local.real() - 2.0 * pair.real();
  }
  return T;
}

}  // namespace faberdyn
