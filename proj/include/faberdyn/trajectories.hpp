#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "faberdyn/faber.hpp"
#include "faberdyn/models.hpp"
#include "faberdyn/rng.hpp"

namespace faberdyn {

struct TrajectoryConfig {
  std::uint64_t seed = 0;
  double dt_max = 0.05;
  double norm_tol = 1e-12;
  double t_final = 1.0;
  std::vector<double> snapshot_times;
  double threshold = kDefaultThreshold;
  /// Left block [0, entropy_cut) for the snapshot entropy; -1 means L/2, 0 disables.
  int entropy_cut = -1;

  void validate() const;
};

struct JumpEvent {
  double time = 0.0;
  int channel = 0;
};

struct Snapshot {
  double time = 0.0;
  RVector magnetization;
  double entropy = 0.0;
};

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  std::vector<JumpEvent> jumps;
  std::vector<Snapshot> snapshots;
  /// Number of times the search horizon was reached with no jump pending.
  std::size_t dark_segments = 0;

  /// One line of JSON: {"seed":..,"index":..,"jumps":[[t,mu],..],"snapshots":[{"t":..,"sz":[..],"S":..},..]}
  std::string to_json_line() const;
  static TrajectoryRecord from_json_line(const std::string& line);
};

/// Read-only data shared by all trajectories of an ensemble: the effective
/// Hamiltonian, its propagator for dt_max and the jump operators.
class JumpSystem {
 public:
  JumpSystem(const SparseOperator& h, std::vector<SparseOperator> jumps,
             std::shared_ptr<const SectorBasis> basis, double dt_max,
             double threshold = kDefaultThreshold);

  const SparseOperator& h_eff() const { return h_eff_; }
  const std::vector<SparseOperator>& jumps() const { return jumps_; }
  const std::shared_ptr<const SectorBasis>& basis() const { return basis_; }
  const FaberPropagator& propagator() const { return prop_; }

 private:
  SparseOperator h_eff_;
  std::vector<SparseOperator> jumps_;
  std::shared_ptr<const SectorBasis> basis_;
  FaberPropagator prop_;
};

struct WaitingTime {
  /// Jump time, or empty when the squared norm stays above the target up to t_max.
  std::optional<double> time;
  /// Unnormalised state at `time` (or at t_max when no jump occurred).
  CVector state;
  /// Time the returned state refers to.
  double t = 0.0;
};

/// Propagates `psi` (given at t0) with the propagator's step until the squared
/// norm drops to `target_norm2`, then bisects inside the bracketing step until
/// the squared norm is within `norm_tol` of the target (at most 60 halvings).
/// Throws NumericalError if the squared norm grows between steps.
WaitingTime find_norm_crossing(const FaberPropagator& prop, const CVector& psi, double target_norm2,
                               double t0, double t_max, double norm_tol);

/// Waiting time for a normalised `psi`: the time at which
/// ||exp(-i H_eff (t - t0)) psi||^2 = 1 - r.
WaitingTime sample_waiting_time(const FaberPropagator& prop, const CVector& psi, double r,
                                double t0, double t_max, double norm_tol);

/// Rates <L_mu^dagger L_mu> on `psi` (not divided by its norm).
std::vector<double> jump_rates(const CVector& psi, const std::vector<SparseOperator>& jumps);

/// Channel mu with probability rate_mu / sum(rates), from a uniform draw u in (0, 1).
/// Throws NumericalError if every rate vanishes.
int select_channel(const CVector& psi, const std::vector<SparseOperator>& jumps, double u);
int select_channel(const std::vector<double>& rates, double u);

/// L psi / ||L psi||. Throws NumericalError on a vanishing image.
CVector apply_jump(const CVector& psi, const SparseOperator& L);

/// Observables recorded on the normalised conditional state.
Snapshot take_snapshot(const CVector& psi, const SectorBasis& basis, double t, int entropy_cut);

/// One trajectory using stream `index` of `config.seed`.
TrajectoryRecord run_trajectory(const TrajectoryConfig& config, const JumpSystem& system,
                                const CVector& initial, std::uint64_t index = 0);

/// Trajectories 0 .. count-1 on up to `threads` workers. Results are ordered by
/// index and do not depend on the thread count.
std::vector<TrajectoryRecord> run_ensemble(const TrajectoryConfig& config, const JumpSystem& system,
                                           const CVector& initial, std::size_t count,
                                           unsigned threads = 1);

struct EnsembleCurve {
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> stderr_;
  std::size_t samples = 0;
};

/// Mean and standard error of the mean over records, per snapshot, using
/// compensated summation.
EnsembleCurve ensemble_average(const std::vector<TrajectoryRecord>& records,
                               const std::function<double(const Snapshot&)>& observable);

/// Trajectory-averaged snapshot entropy.
EnsembleCurve conditional_entropy_average(const std::vector<TrajectoryRecord>& records);

/// Sample mean and standard error of `values` with compensated sums.
std::pair<double, double> mean_and_stderr(const std::vector<double>& values);

}  // namespace faberdyn
