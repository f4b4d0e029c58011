#pragma once

#include <vector>

#include "faberdyn/models.hpp"

namespace faberdyn {

inline constexpr Index kDenseExpmMaxDim = 4096;
inline constexpr Index kLindbladMaxDim = 64;

/// exp(-i t A) by scaling and squaring with a Pade approximant on the dense
/// matrix. Dimension capped at kDenseExpmMaxDim.
CMatrix dense_expm(const SparseOperator& op, double t);
CMatrix dense_expm(const CMatrix& a, double t);

struct LindbladTrajectory {
  std::vector<double> times;
  std::vector<CMatrix> rho;
  /// Largest |tr(rho) - 1| met during integration.
  double max_trace_drift = 0.0;
};

/// Classical RK4 for d rho/dt = -i[H, rho] + sum_mu (L rho L^dagger - {L^dagger L, rho}/2),
/// reporting rho at each time of `t_grid` (non-decreasing, starting at >= 0).
/// Internal step <= max_step. Throws NumericalError if the trace drifts by
/// more than 1e-6.
LindbladTrajectory rk4_lindblad(const SparseOperator& h, const std::vector<SparseOperator>& jumps,
                                const CMatrix& rho0, const std::vector<double>& t_grid,
                                double max_step = 1e-3);

struct DenseEigen {
  CVector values;
  /// Columns are right eigenvectors, unit 2-norm.
  CMatrix right;
  /// Columns are left eigenvectors u with u^dagger A = lambda u^dagger, unit 2-norm.
  CMatrix left;
};

/// General complex eigensolver (LAPACK zgeev, balanced).
DenseEigen dense_eigensolve(const CMatrix& a, bool vectors = true);

struct HnSpectrum {
  /// Sorted by mode index n = 1 .. L (OBC) or k = 2 pi n / L, n = 0 .. L-1 (PBC).
  std::vector<cplx> energies;
  /// OBC only. right(:, n) = e^{l theta} sqrt(2/(L+1)) sin(k_n (l+1)),
  /// left(:, n) = conj(e^{-l theta}) sqrt(2/(L+1)) sin(k_n (l+1)); left^dagger right = I.
  CMatrix right;
  CMatrix left;
  /// theta = (1/2) log((J - gamma)/(J + gamma)); complex for |gamma| > J.
  cplx theta{0.0, 0.0};
};

/// Closed-form open-chain spectrum E_n = -sqrt(J^2 - gamma^2) cos(pi n/(L+1)) and
/// its biorthogonal eigenvectors. Throws at the exceptional point |gamma| = J.
HnSpectrum hn_obc_spectrum(const ModelParams& params);
/// Closed-form ring spectrum E(k) = -(J cos k + i gamma sin k).
HnSpectrum hn_pbc_spectrum(const ModelParams& params);

/// 1 / |log((J - gamma)/(J + gamma))|; infinite at gamma = 0, zero at |gamma| = J.
double localization_length(const ModelParams& params);

/// Decay rate of the envelope of a standing wave v_l = A r^l sin(k l + phi).
/// The Casoratian D_l = v_l^2 - v_{l-1} v_{l+1} = A^2 sin^2(k) r^{2l} removes
/// the oscillation; log|D_l| is fitted by least squares over sites where
/// |D_l| exceeds `floor` times its maximum. Returns log r.
double envelope_log_rate(const CVector& v, double floor = 1e-12);

struct GhdPoint {
  double density = 0.0;
  double current = 0.0;
  double entropy = 0.0;
};

struct GhdPrediction {
  double v_eff = 1.0;
  double J = 1.0;
  static constexpr double c1 = 0.4785;

  /// x measured from the domain-wall bond (sites carry half-integer x).
  GhdPoint at(double x, double t) const;
};

/// v_eff = J - gamma for the filled-left domain wall.
GhdPrediction ghd_predict(const ModelParams& params);
GhdPoint ghd_predict(const ModelParams& params, double t, double x);

/// L* = (J - gamma)/(J + gamma) L.
double effective_length(const ModelParams& params, int L);

/// Position where `profile` (sampled at x_k) first crosses `level` going
/// outward from index `from` in direction `dir` (+1 or -1), linearly interpolated.
/// Returns NaN if it never crosses.
double level_crossing(const std::vector<double>& x, const RVector& profile, double level,
                      std::size_t from, int dir);

/// Velocity v minimising sum_k (n_k - arccos(clamp(x_k / (v t))) / pi)^2 over
/// [v_lo, v_hi]: the scaling-function fit of a melting domain-wall density.
double fit_front_velocity(const std::vector<double>& x, const RVector& density, double t,
                          double v_lo, double v_hi);

/// Least-squares slope and intercept.
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace faberdyn
