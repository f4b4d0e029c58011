#include "faberdyn/manybody.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <tuple>

#include <Eigen/SVD>

namespace faberdyn {

namespace {

ManyBodyState normalized(CVector amps, const std::shared_ptr<const SectorBasis>& basis) {
  const double n = amps.norm();
  if (!(n > 1e-300) || !std::isfinite(n))
    throw NumericalError("many-body state norm vanished or overflowed");
  amps /= n;
  return {std::move(amps), basis};
}

void require_basis(const ManyBodyState& s) {
  if (!s.basis) throw InvalidArgument("many-body state has no basis");
  if (s.amplitudes.size() != s.basis->size())
    throw InvalidArgument("many-body state size does not match its basis");
}

}  // namespace

ManyBodyState product_state(std::shared_ptr<const SectorBasis> basis, std::uint64_t word) {
  if (!basis) throw InvalidArgument("product_state: null basis");
  const auto idx = basis->index_of(word);
  if (!idx) throw InvalidArgument("product_state: configuration not in basis");
  ManyBodyState s{CVector::Zero(basis->size()), basis};
  s.amplitudes(*idx) = 1.0;
  return s;
}

ManyBodyState neel_state(std::shared_ptr<const SectorBasis> basis) {
  if (!basis) throw InvalidArgument("neel_state: null basis");
  std::uint64_t w = 0;
  for (int l = 0; l < basis->n_sites(); l += 2) w |= std::uint64_t{1} << l;
  return product_state(std::move(basis), w);
}

ManyBodyState dw_state(std::shared_ptr<const SectorBasis> basis) {
  if (!basis) throw InvalidArgument("dw_state: null basis");
  const std::uint64_t w = (std::uint64_t{1} << (basis->n_sites() / 2)) - 1;
  return product_state(std::move(basis), w);
}

ManyBodyState evolve_step(const ManyBodyState& state, const SparseOperator& H,
                          const FaberCoefficients& coeffs, const EllipseParams& params) {
  require_basis(state);
  CMatrix out = faber_apply(H.linear_map(), params, coeffs, state.amplitudes);
  return normalized(out.col(0), state.basis);
}

ManyBodyState evolve_step(const ManyBodyState& state, const FaberPropagator& prop) {
  require_basis(state);
  CMatrix out = prop.step(state.amplitudes);
  return normalized(out.col(0), state.basis);
}

RVector magnetization_profile(const ManyBodyState& state) {
  require_basis(state);
  const int L = state.basis->n_sites();
  RVector up = RVector::Zero(L);
  double total = 0.0;
  for (Index i = 0; i < state.basis->size(); ++i) {
    const double p = std::norm(state.amplitudes(i));
    if (p == 0.0) continue;
    total += p;
    std::uint64_t w = state.basis->state(i);
    while (w) {
      up(std::countr_zero(w)) += p;
      w &= w - 1;
    }
  }
  if (!(total > 0.0)) throw InvalidArgument("magnetization_profile: zero state");
  return up / total - RVector::Constant(L, 0.5);
}

RVector spin_current_profile(const ManyBodyState& state, double J) {
  require_basis(state);
  const int L = state.basis->n_sites();
  const SectorBasis& basis = *state.basis;
  std::vector<cplx> hop(static_cast<std::size_t>(std::max(L - 1, 0)), cplx{0.0, 0.0});
  for (Index i = 0; i < basis.size(); ++i) {
    const cplx a = state.amplitudes(i);
    if (a == cplx{0.0, 0.0}) continue;
    const std::uint64_t w = basis.state(i);
    for (int l = 0; l + 1 < L; ++l) {
      // S+_{l+1} S-_l needs site l up and l+1 down.
      if (((w >> l) & 1u) && !((w >> (l + 1)) & 1u)) {
        const std::uint64_t target = w ^ (std::uint64_t{3} << l);
        const auto j = basis.index_of(target);
        if (j) hop[l] += std::conj(state.amplitudes(*j)) * a;
      }
    }
  }
  const double n2 = state.amplitudes.squaredNorm();
  if (!(n2 > 0.0)) throw InvalidArgument("spin_current_profile: zero state");
  RVector I(std::max(L - 1, 0));
  for (int l = 0; l + 1 < L; ++l) I(l) = -J * hop[l].imag() / n2;
  return I;
}

double bipartite_entropy(const ManyBodyState& state, int cut, double eps) {
  require_basis(state);
  const int L = state.basis->n_sites();
  if (cut < 0 || cut > L) throw InvalidArgument("bipartite_entropy: cut outside [0, L]");
  if (cut == 0 || cut == L) return 0.0;
  const bool sector = state.basis->n_up() >= 0;
  const std::uint64_t mask = (std::uint64_t{1} << cut) - 1;

  // Group amplitudes by left magnetisation (sector) or into one block (full space).
  struct Block {
    std::map<std::uint64_t, Index> rows;
    std::map<std::uint64_t, Index> cols;
    std::vector<std::tuple<std::uint64_t, std::uint64_t, cplx>> entries;
  };
  std::map<int, Block> blocks;
  double n2 = 0.0;
  for (Index i = 0; i < state.basis->size(); ++i) {
    const cplx a = state.amplitudes(i);
    if (a == cplx{0.0, 0.0}) continue;
    n2 += std::norm(a);
    const std::uint64_t w = state.basis->state(i);
    const std::uint64_t left = w & mask;
    const std::uint64_t right = w >> cut;
    Block& b = blocks[sector ? std::popcount(left) : 0];
    b.rows.emplace(left, 0);
    b.cols.emplace(right, 0);
    b.entries.emplace_back(left, right, a);
  }
  if (!(n2 > 0.0)) throw InvalidArgument("bipartite_entropy: zero state");

  double s = 0.0;
  for (auto& [key, b] : blocks) {
    Index k = 0;
    for (auto& [w, idx] : b.rows) idx = k++;
    k = 0;
    for (auto& [w, idx] : b.cols) idx = k++;
    CMatrix m = CMatrix::Zero(static_cast<Index>(b.rows.size()), static_cast<Index>(b.cols.size()));
    for (const auto& [l, r, a] : b.entries) m(b.rows[l], b.cols[r]) = a;
    Eigen::BDCSVD<CMatrix> svd(m);
    for (Index j = 0; j < svd.singularValues().size(); ++j) {
      const double p = svd.singularValues()(j) * svd.singularValues()(j) / n2;
      if (p > eps) s -= p * std::log(p);
    }
  }
  return s;
}

RVector time_averaged_profile(const std::vector<double>& times,
                              const std::vector<RVector>& profiles, double tau_star, double T) {
  if (times.size() != profiles.size() || times.empty())
    throw InvalidArgument("time_averaged_profile: need matching, non-empty series");
  if (T < 0.0) throw InvalidArgument("time_averaged_profile: T must be >= 0");
  const double t_end = tau_star + T;
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < times.size(); ++k)
    if (times[k] >= tau_star - 1e-12 && times[k] <= t_end + 1e-12) idx.push_back(k);
  if (idx.empty()) throw InvalidArgument("time_averaged_profile: no samples in the window");
  if (idx.size() == 1) return profiles[idx[0]];

  RVector acc = RVector::Zero(profiles[idx[0]].size());
  double span = 0.0;
  for (std::size_t j = 0; j + 1 < idx.size(); ++j) {
    const double h = times[idx[j + 1]] - times[idx[j]];
    acc += 0.5 * h * (profiles[idx[j]] + profiles[idx[j + 1]]);
    span += h;
  }
  if (!(span > 0.0)) return profiles[idx[0]];
  return acc / span;
}

double estimate_tau_star(const std::vector<double>& times, const std::vector<double>& series,
                         double fraction, double plateau_fraction) {
  if (times.size() != series.size() || times.size() < 2)
    throw InvalidArgument("estimate_tau_star: need at least two matching samples");
  const std::size_t n = times.size();
  const std::size_t tail = std::max<std::size_t>(1, static_cast<std::size_t>(plateau_fraction * n));
  double plateau = 0.0;
  for (std::size_t k = n - tail; k < n; ++k) plateau += series[k];
  plateau /= static_cast<double>(tail);
  const double dist = std::abs(plateau - series.front());
  if (dist == 0.0) return times.front();
  for (std::size_t k = 0; k < n; ++k)
    if (std::abs(series[k] - plateau) <= (1.0 - fraction) * dist) return times[k];
  return times.back();
}

}  // namespace faberdyn
