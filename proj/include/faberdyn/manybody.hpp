#pragma once

#include <memory>
#include <vector>

#include "faberdyn/faber.hpp"
#include "faberdyn/models.hpp"

namespace faberdyn {

struct ManyBodyState {
  CVector amplitudes;
  std::shared_ptr<const SectorBasis> basis;

  double norm() const { return amplitudes.norm(); }
};

/// |up, down, up, down, ...> with site 0 up. Needs n_up = ceil(L/2) or the full space.
ManyBodyState neel_state(std::shared_ptr<const SectorBasis> basis);
/// Sites 0 .. L/2-1 up, the rest down. Needs n_up = L/2 or the full space.
ManyBodyState dw_state(std::shared_ptr<const SectorBasis> basis);
/// Single basis word with unit amplitude.
ManyBodyState product_state(std::shared_ptr<const SectorBasis> basis, std::uint64_t word);

/// Propagate one step and rescale to unit norm. Throws NumericalError if the
/// norm underflows.
ManyBodyState evolve_step(const ManyBodyState& state, const SparseOperator& H,
                          const FaberCoefficients& coeffs, const EllipseParams& params);
ManyBodyState evolve_step(const ManyBodyState& state, const FaberPropagator& prop);

/// <Sz_l> for l = 0 .. L-1 (the state need not be normalised; the profile is
/// divided by the squared norm).
RVector magnetization_profile(const ManyBodyState& state);
/// I_l = (iJ/2) <S+_{l+1} S-_l - S+_l S-_{l+1}> = -J Im <S+_{l+1} S-_l>, l = 0 .. L-2.
RVector spin_current_profile(const ManyBodyState& state, double J);

/// von Neumann entropy of sites [0, cut). In a magnetisation sector the
/// amplitude matrix is block diagonal in the left magnetisation and each
/// block is decomposed separately.
double bipartite_entropy(const ManyBodyState& state, int cut, double eps = 1e-12);

/// Trapezoidal mean of profiles[k] sampled at times[k] over [tau_star, tau_star + T].
/// With a single sample in range that sample is returned.
RVector time_averaged_profile(const std::vector<double>& times,
                              const std::vector<RVector>& profiles, double tau_star, double T);

/// First time at which `series` is within (1 - fraction) of the distance
/// between its initial value and its late-time plateau (mean over the last
/// `plateau_fraction` of the samples).
double estimate_tau_star(const std::vector<double>& times, const std::vector<double>& series,
                         double fraction = 0.95, double plateau_fraction = 0.2);

}  // namespace faberdyn
