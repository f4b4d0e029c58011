#include "faberdyn/models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace faberdyn {

namespace {

constexpr int kMaxFullSites = 26;
constexpr int kMaxSectorSites = 62;

bool up(std::uint64_t word, int site) { return (word >> site) & 1u; }
std::uint64_t flip(std::uint64_t word, int site) { return word ^ (std::uint64_t{1} << site); }

Index require_index(const SectorBasis& basis, std::uint64_t word) {
  const auto idx = basis.index_of(word);
  if (!idx) throw InvalidArgument("operator leaves the basis; build it on the full space");
  return *idx;
}

}  // namespace

std::string to_string(Boundary b) { return b == Boundary::Open ? "obc" : "pbc"; }

Boundary boundary_from_string(const std::string& s) {
  if (s == "obc" || s == "open") return Boundary::Open;
  if (s == "pbc" || s == "periodic") return Boundary::Periodic;
  throw InvalidArgument("unknown boundary '" + s + "' (expected obc or pbc)");
}

void ModelParams::validate() const {
  if (L < 2) throw InvalidArgument("model: L must be >= 2");
  if (!(J > 0.0) || !std::isfinite(J)) throw InvalidArgument("model: J must be > 0");
  if (!std::isfinite(gamma) || !std::isfinite(delta))
    throw InvalidArgument("model: gamma and delta must be finite");
}

SectorBasis::SectorBasis(int n_sites, int n_up, std::vector<std::uint64_t> states)
    : n_sites_(n_sites), n_up_(n_up), states_(std::move(states)) {}

SectorBasis SectorBasis::sector(int n_sites, int n_up) {
  if (n_sites < 1 || n_sites > kMaxSectorSites) throw InvalidArgument("sector: unsupported L");
  if (n_up < 0 || n_up > n_sites) throw InvalidArgument("sector: n_up out of range");
  std::vector<std::uint64_t> states;
  if (n_up == 0) {
    states.push_back(0);
  } else {
    // Gosper's hack enumerates fixed-popcount words in increasing order.
    std::uint64_t w = (std::uint64_t{1} << n_up) - 1;
    const std::uint64_t limit = std::uint64_t{1} << n_sites;
    while (w < limit) {
      states.push_back(w);
      const std::uint64_t c = w & (~w + 1);
      const std::uint64_t r = w + c;
      w = (((r ^ w) >> 2) / c) | r;
    }
  }
  return SectorBasis(n_sites, n_up, std::move(states));
}

SectorBasis SectorBasis::full(int n_sites) {
  if (n_sites < 1 || n_sites > kMaxFullSites) throw InvalidArgument("full basis: unsupported L");
  std::vector<std::uint64_t> states(std::size_t{1} << n_sites);
  for (std::size_t i = 0; i < states.size(); ++i) states[i] = i;
  return SectorBasis(n_sites, -1, std::move(states));
}

std::optional<Index> SectorBasis::index_of(std::uint64_t word) const {
  if (n_up_ < 0) {
    if (word < states_.size()) return static_cast<Index>(word);
    return std::nullopt;
  }
  if (std::popcount(word) != n_up_) return std::nullopt;
  const auto it = std::lower_bound(states_.begin(), states_.end(), word);
  if (it == states_.end() || *it != word) return std::nullopt;
  return static_cast<Index>(it - states_.begin());
}

SparseOperator build_hn_single_particle(const ModelParams& params) {
  params.validate();
  const int L = params.L;
  const cplx forward = -0.5 * (params.J + params.gamma);   // c+_l c_{l+1}
  const cplx backward = -0.5 * (params.J - params.gamma);  // c+_{l+1} c_l
  std::vector<Triplet> t;
  const int bonds = params.boundary == Boundary::Periodic ? L : L - 1;
  for (int l = 0; l < bonds; ++l) {
    const int r = (l + 1) % L;
    t.emplace_back(l, r, forward);
    t.emplace_back(r, l, backward);
  }
  return SparseOperator::from_triplets(L, t);
}

SparseOperator build_xxz_nonreciprocal(const ModelParams& params, const SectorBasis& basis) {
  params.validate();
  if (basis.n_sites() != params.L) throw InvalidArgument("xxz: basis size does not match L");
  if (params.boundary != Boundary::Open)
    throw InvalidArgument("xxz: only open boundaries are supported for many-body chains");
  const int L = params.L;
  const cplx hop_left = -0.5 * (params.J + params.gamma);   // S+_l S-_{l+1}
  const cplx hop_right = -0.5 * (params.J - params.gamma);  // S+_{l+1} S-_l
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(basis.size()) * static_cast<std::size_t>(L));
  for (Index col = 0; col < basis.size(); ++col) {
    const std::uint64_t w = basis.state(col);
    double diag = 0.0;
    for (int l = 0; l + 1 < L; ++l) {
      const bool a = up(w, l);
      const bool b = up(w, l + 1);
      diag -= params.delta * (a == b ? 0.25 : -0.25);
      if (a == b) continue;
      const std::uint64_t target = flip(flip(w, l), l + 1);
      t.emplace_back(require_index(basis, target), col, b ? hop_left : hop_right);
    }
    if (diag != 0.0) t.emplace_back(col, col, cplx{diag, 0.0});
  }
  return SparseOperator::from_triplets(basis.size(), t);
}

SparseOperator spin_lowering(const SectorBasis& basis, int site) {
  if (basis.n_up() >= 0) throw InvalidArgument("spin_lowering needs the full basis");
  std::vector<Triplet> t;
  for (Index col = 0; col < basis.size(); ++col) {
    const std::uint64_t w = basis.state(col);
    if (up(w, site)) t.emplace_back(require_index(basis, flip(w, site)), col, cplx{1.0, 0.0});
  }
  return SparseOperator::from_triplets(basis.size(), t);
}

SparseOperator spin_raising(const SectorBasis& basis, int site) {
  return spin_lowering(basis, site).adjoint();
}

SparseOperator spin_z(const SectorBasis& basis, int site) {
  std::vector<Triplet> t;
  for (Index i = 0; i < basis.size(); ++i)
    t.emplace_back(i, i, cplx{up(basis.state(i), site) ? 0.5 : -0.5, 0.0});
  return SparseOperator::from_triplets(basis.size(), t);
}

std::vector<SparseOperator> build_model_a_jumps(const ModelParams& params) {
  params.validate();
  const int L = params.L;
  const SectorBasis basis = SectorBasis::full(L);
  const double amp = std::sqrt(std::abs(params.gamma));
  const double sgn = params.gamma > 0.0 ? 1.0 : (params.gamma < 0.0 ? -1.0 : 0.0);

  std::vector<SparseOperator> lowering;
  lowering.reserve(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) lowering.push_back(spin_lowering(basis, l));

  std::vector<SparseOperator> jumps;
  jumps.reserve(static_cast<std::size_t>(L) + 1);
  jumps.push_back(lowering[0].scaled(amp));
  for (int l = 0; l + 1 < L; ++l)
    jumps.push_back((lowering[l] - lowering[l + 1].scaled(kI * sgn)).scaled(amp));
  jumps.push_back(lowering[L - 1].scaled(amp));
  return jumps;
}

std::vector<SparseOperator> build_model_b_jumps(const ModelParams& params, const SectorBasis& basis) {
  params.validate();
  if (params.gamma < 0.0) throw InvalidArgument("model B requires gamma >= 0");
  if (basis.n_sites() != params.L) throw InvalidArgument("model B: basis size does not match L");
  const double amp = std::sqrt(params.gamma);
  std::vector<SparseOperator> jumps;
  for (int l = 0; l + 1 < params.L; ++l) {
    std::vector<Triplet> t;
    for (Index col = 0; col < basis.size(); ++col) {
      const std::uint64_t w = basis.state(col);
      if (!up(w, l) && up(w, l + 1))
        t.emplace_back(require_index(basis, flip(flip(w, l), l + 1)), col, cplx{amp, 0.0});
    }
    jumps.push_back(SparseOperator::from_triplets(basis.size(), t));
  }
  return jumps;
}

SparseOperator effective_hamiltonian(const SparseOperator& h, const std::vector<SparseOperator>& jumps) {
  SparseOperator out = h;
  for (const auto& l : jumps) {
    if (l.dim() != h.dim()) throw InvalidArgument("effective_hamiltonian: jump dimension mismatch");
    out = out - (l.adjoint() * l).scaled(cplx{0.0, 0.5});
  }
  return out;
}

SpectralBounds hn_analytic_bounds(const ModelParams& params) {
  params.validate();
  // Hermitian part: hopping J/2, skew part: hopping |gamma|/2.
  const double c = params.boundary == Boundary::Open
                       ? std::cos(std::numbers::pi / (params.L + 1))
                       : 1.0;
  const double re = params.J * c;
  const double im = std::abs(params.gamma) * c;
  return {-re, re, -im, im};
}

SpectralBounds xxz_analytic_bounds(const ModelParams& params) {
  params.validate();
  const double bonds = params.L - 1;
  const double d = params.delta;
  const double lo = std::min(-d / 4.0, d / 4.0 - params.J / 2.0);
  const double hi = std::max(-d / 4.0, d / 4.0 + params.J / 2.0);
  const double im = std::abs(params.gamma) / 2.0;
  return {bonds * lo, bonds * hi, -bonds * im, bonds * im};
}

SpectralBounds tightened_bounds(const SparseOperator& op, const SpectralBounds& analytic) {
  return SpectralBounds::intersect(gershgorin_bounds(op), analytic);
}

}  // namespace faberdyn
