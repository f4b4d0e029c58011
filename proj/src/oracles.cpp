#include "faberdyn/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace faberdyn {

CMatrix dense_expm(const CMatrix& a, double t) {
  if (a.rows() != a.cols()) throw InvalidArgument("dense_expm: matrix is not square");
  if (a.rows() > kDenseExpmMaxDim) throw InvalidArgument("dense_expm: dimension above cap");
  if (t == 0.0) return CMatrix::Identity(a.rows(), a.cols());
  const CMatrix m = cplx{0.0, -t} * a;
  return m.exp();
}

CMatrix dense_expm(const SparseOperator& op, double t) {
  if (op.dim() > kDenseExpmMaxDim) throw InvalidArgument("dense_expm: dimension above cap");
  return dense_expm(op.to_dense(), t);
}

LindbladTrajectory rk4_lindblad(const SparseOperator& h, const std::vector<SparseOperator>& jumps,
                                const CMatrix& rho0, const std::vector<double>& t_grid,
                                double max_step) {
  const Index n = h.dim();
  if (n > kLindbladMaxDim) throw InvalidArgument("rk4_lindblad: dimension above 64");
  if (rho0.rows() != n || rho0.cols() != n) throw InvalidArgument("rk4_lindblad: rho0 has the wrong shape");
  if (!(max_step > 0.0 && max_step <= 1e-3)) throw InvalidArgument("rk4_lindblad: max_step must lie in (0, 1e-3]");
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (!(t_grid[k] >= 0.0) || (k > 0 && t_grid[k] < t_grid[k - 1]))
      throw InvalidArgument("rk4_lindblad: time grid must be non-negative and non-decreasing");
  }

  const CMatrix H = h.to_dense();
  std::vector<CMatrix> Ls;
  CMatrix gain = CMatrix::Zero(n, n);
  for (const auto& j : jumps) {
    if (j.dim() != n) throw InvalidArgument("rk4_lindblad: jump dimension mismatch");
    Ls.push_back(j.to_dense());
    gain += Ls.back().adjoint() * Ls.back();
  }
  // d rho/dt = -i (K rho - rho K^dagger) + sum L rho L^dagger, K = H - (i/2) sum L^dagger L.
  const CMatrix K = H - cplx{0.0, 0.5} * gain;
  const CMatrix Kd = K.adjoint();
  auto rhs = [&](const CMatrix& r) {
    CMatrix out = cplx{0.0, -1.0} * (K * r - r * Kd);
    for (const auto& L : Ls) out.noalias() += L * r * L.adjoint();
    return out;
  };

  LindbladTrajectory res;
  const double tr0 = rho0.trace().real();
  CMatrix rho = rho0;
  double t = 0.0;
  for (double target : t_grid) {
    const double span = target - t;
    if (span > 0.0) {
      const long steps = static_cast<long>(std::ceil(span / max_step - 1e-9));
      const double h_step = span / static_cast<double>(steps);
      for (long s = 0; s < steps; ++s) {
        const CMatrix k1 = rhs(rho);
        const CMatrix k2 = rhs(rho + 0.5 * h_step * k1);
        const CMatrix k3 = rhs(rho + 0.5 * h_step * k2);
        const CMatrix k4 = rhs(rho + h_step * k3);
        rho += (h_step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double drift = std::abs(rho.trace().real() - tr0);
        res.max_trace_drift = std::max(res.max_trace_drift, drift);
        if (drift > 1e-6)
          throw NumericalError("rk4_lindblad: trace drifted by " + std::to_string(drift));
      }
      t = target;
    }
    res.times.push_back(target);
    res.rho.push_back(rho);
  }
  return res;
}

DenseEigen dense_eigensolve(const CMatrix& a, bool vectors) {
  if (a.rows() != a.cols()) throw InvalidArgument("dense_eigensolve: matrix is not square");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  DenseEigen out;
  out.values.resize(n);
  if (n == 0) return out;
  CMatrix work = a;
  const char job = vectors ? 'V' : 'N';
  if (vectors) {
    out.left.resize(n, n);
    out.right.resize(n, n);
  }
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, job, job, n, work.data(), n, out.values.data(),
      vectors ? out.left.data() : nullptr, vectors ? n : 1, vectors ? out.right.data() : nullptr,
      vectors ? n : 1);
  if (info != 0) throw NumericalError("dense_eigensolve: zgeev failed with info " + std::to_string(info));
  return out;
}

HnSpectrum hn_obc_spectrum(const ModelParams& params) {
  params.validate();
  const double J = params.J;
  const double g = params.gamma;
  if (std::abs(std::abs(g) - J) <= 1e-14 * J)
    throw InvalidArgument("hn_obc_spectrum: |gamma| = J is an exceptional point");
  const int L = params.L;
  HnSpectrum s;
  const cplx ratio = cplx{(J - g) / (J + g), 0.0};
  s.theta = 0.5 * std::log(ratio);
  const cplx band = std::sqrt(cplx{J * J - g * g, 0.0});
  const cplx r = std::exp(s.theta);
  const double norm = std::sqrt(2.0 / (L + 1));
  s.right.resize(L, L);
  s.left.resize(L, L);
  for (int n = 1; n <= L; ++n) {
    const double k = std::numbers::pi * n / (L + 1);
    s.energies.push_back(-band * std::cos(k));
    cplx rl{1.0, 0.0};
    for (int l = 0; l < L; ++l) {
      const double u = norm * std::sin(k * (l + 1));
      s.right(l, n - 1) = rl * u;
      s.left(l, n - 1) = std::conj(1.0 / rl) * u;
      rl *= r;
    }
  }
  return s;
}

HnSpectrum hn_pbc_spectrum(const ModelParams& params) {
  params.validate();
  HnSpectrum s;
  for (int n = 0; n < params.L; ++n) {
    const double k = 2.0 * std::numbers::pi * n / params.L;
    s.energies.push_back(-cplx{params.J * std::cos(k), params.gamma * std::sin(k)});
  }
  return s;
}

double localization_length(const ModelParams& params) {
  params.validate();
  if (params.gamma == 0.0) return std::numeric_limits<double>::infinity();
  if (std::abs(params.gamma) >= params.J) return 0.0;
  return 1.0 / std::abs(std::log((params.J - params.gamma) / (params.J + params.gamma)));
}

double envelope_log_rate(const CVector& v, double floor) {
  const Index L = v.size();
  if (L < 4) throw InvalidArgument("envelope_log_rate: need at least 4 sites");
  std::vector<double> logd(static_cast<std::size_t>(L), -std::numeric_limits<double>::infinity());
  double dmax = 0.0;
  for (Index l = 1; l + 1 < L; ++l) {
    const double d = std::abs(v(l) * v(l) - v(l - 1) * v(l + 1));
    dmax = std::max(dmax, d);
    logd[l] = d > 0.0 ? std::log(d) : logd[l];
  }
  if (!(dmax > 0.0)) throw NumericalError("envelope_log_rate: vanishing Casoratian");
  const double cut = std::log(dmax * floor);
  std::vector<double> xs;
  std::vector<double> ys;
  for (Index l = 1; l + 1 < L; ++l) {
    if (logd[l] >= cut) {
      xs.push_back(static_cast<double>(l));
      ys.push_back(logd[l]);
    }
  }
  if (xs.size() < 2) throw NumericalError("envelope_log_rate: too few sites above the floor");
  return 0.5 * linear_fit(xs, ys).first;
}

GhdPoint GhdPrediction::at(double x, double t) const {
  GhdPoint p;
  const double front = v_eff * t;
  if (!(front > 0.0) || std::abs(x) >= front) {
    p.density = x < 0.0 ? 1.0 : 0.0;
    p.current = 0.0;
    p.entropy = 0.0;
    return p;
  }
  const double u = x / front;
  p.density = std::acos(u) / std::numbers::pi;
  p.current = J * std::sqrt(1.0 - u * u) / std::numbers::pi;
  p.entropy = std::log(front * std::pow(1.0 - u * u, 1.5)) / 6.0 + c1;
  return p;
}

GhdPrediction ghd_predict(const ModelParams& params) {
  params.validate();
  GhdPrediction g;
  g.J = params.J;
  g.v_eff = params.J - params.gamma;
  return g;
}

GhdPoint ghd_predict(const ModelParams& params, double t, double x) {
  return ghd_predict(params).at(x, t);
}

double effective_length(const ModelParams& params, int L) {
  params.validate();
  return (params.J - params.gamma) / (params.J + params.gamma) * L;
}

double level_crossing(const std::vector<double>& x, const RVector& profile, double level,
                      std::size_t from, int dir) {
  if (x.size() != static_cast<std::size_t>(profile.size()) || x.empty())
    throw InvalidArgument("level_crossing: size mismatch");
  if (dir != 1 && dir != -1) throw InvalidArgument("level_crossing: dir must be +1 or -1");
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
  for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(from); i + dir >= 0 && i + dir < n; i += dir) {
    const double a = profile(i) - level;
    const double b = profile(i + dir) - level;
    if (a == 0.0) return x[static_cast<std::size_t>(i)];
    if ((a > 0.0) != (b > 0.0)) {
      const double f = a / (a - b);
      return x[static_cast<std::size_t>(i)] + f * (x[static_cast<std::size_t>(i + dir)] - x[static_cast<std::size_t>(i)]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double fit_front_velocity(const std::vector<double>& x, const RVector& density, double t,
                          double v_lo, double v_hi) {
  if (x.size() != static_cast<std::size_t>(density.size()) || x.empty())
    throw InvalidArgument("fit_front_velocity: size mismatch");
  if (!(t > 0.0) || !(v_lo > 0.0) || !(v_hi > v_lo))
    throw InvalidArgument("fit_front_velocity: need t > 0 and 0 < v_lo < v_hi");
  auto cost = [&](double v) {
    double c = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double u = std::clamp(x[k] / (v * t), -1.0, 1.0);
      const double r = density(static_cast<Index>(k)) - std::acos(u) / std::numbers::pi;
      c += r * r;
    }
    return c;
  };
  return boost::math::tools::brent_find_minima(cost, v_lo, v_hi, 40).first;
}

std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("linear_fit: need two or more points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("linear_fit: degenerate abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace faberdyn
