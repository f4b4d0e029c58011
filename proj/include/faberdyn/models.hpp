#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "faberdyn/sparse_operator.hpp"

namespace faberdyn {

enum class Boundary { Open, Periodic };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

struct ModelParams {
  double J = 1.0;
  double gamma = 0.0;
  double delta = 0.0;
  int L = 2;
  Boundary boundary = Boundary::Open;

  void validate() const;
};

/// Spin-1/2 configurations of L sites as L-bit words; bit l set means site l
/// is up (occupied). Words are stored in increasing unsigned order with site 0
/// as the least significant bit.
class SectorBasis {
 public:
  /// All words with exactly `n_up` bits set.
  static SectorBasis sector(int n_sites, int n_up);
  /// All 2^L words.
  static SectorBasis full(int n_sites);

  int n_sites() const { return n_sites_; }
  /// Number of up spins, or -1 for the full space.
  int n_up() const { return n_up_; }
  Index size() const { return static_cast<Index>(states_.size()); }
  std::uint64_t state(Index i) const { return states_[static_cast<std::size_t>(i)]; }
  const std::vector<std::uint64_t>& states() const { return states_; }
  std::optional<Index> index_of(std::uint64_t word) const;

 private:
  SectorBasis(int n_sites, int n_up, std::vector<std::uint64_t> states);
  int n_sites_ = 0;
  int n_up_ = -1;
  std::vector<std::uint64_t> states_;
};

/// -(J + gamma)/2 on (l, l+1) and -(J - gamma)/2 on (l+1, l).
SparseOperator build_hn_single_particle(const ModelParams& params);

/// -sum_l [(J+gamma)/2 S+_l S-_{l+1} + (J-gamma)/2 S+_{l+1} S-_l + Delta Sz_l Sz_{l+1}],
/// open chain, restricted to `basis`.
SparseOperator build_xxz_nonreciprocal(const ModelParams& params, const SectorBasis& basis);

/// L+1 single-site / bond lowering channels on the full 2^L space:
///   L_0 = sqrt|g| S-_0,  L_{1+l} = sqrt|g| (S-_l - i sgn(g) S-_{l+1}),  L_L = sqrt|g| S-_{L-1}.
std::vector<SparseOperator> build_model_a_jumps(const ModelParams& params);

/// L-1 directed spin-flip channels L_l = sqrt(g) S+_l S-_{l+1} on `basis`
/// (full space or a magnetisation sector). Requires gamma >= 0.
std::vector<SparseOperator> build_model_b_jumps(const ModelParams& params, const SectorBasis& basis);

/// H - (i/2) sum_mu L_mu^dagger L_mu.
SparseOperator effective_hamiltonian(const SparseOperator& h, const std::vector<SparseOperator>& jumps);

/// Box containing the numerical range of the single-particle Hatano-Nelson matrix.
SpectralBounds hn_analytic_bounds(const ModelParams& params);
/// Bond-sum box containing the numerical range of the non-reciprocal XXZ chain.
SpectralBounds xxz_analytic_bounds(const ModelParams& params);
/// Gershgorin box intersected with a rigorous analytic box.
SpectralBounds tightened_bounds(const SparseOperator& op, const SpectralBounds& analytic);

/// Single-site spin operators on `basis`. S- and S+ require the full space.
SparseOperator spin_lowering(const SectorBasis& basis, int site);
SparseOperator spin_raising(const SectorBasis& basis, int site);
SparseOperator spin_z(const SectorBasis& basis, int site);

}  // namespace faberdyn
