#include "faberdyn/trajectories.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "faberdyn/manybody.hpp"

namespace faberdyn {

namespace {

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      c += (sum - t) + x;
    else
      c += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

}  // namespace

void TrajectoryConfig::validate() const {
  if (!(dt_max > 0.0) || !std::isfinite(dt_max)) throw InvalidArgument("trajectory: dt_max must be > 0");
  if (!(norm_tol > 0.0 && norm_tol <= 1e-6))
    throw InvalidArgument("trajectory: norm_tol must lie in (0, 1e-6]");
  if (!(t_final >= 0.0) || !std::isfinite(t_final))
    throw InvalidArgument("trajectory: t_final must be finite and >= 0");
  for (std::size_t k = 0; k < snapshot_times.size(); ++k) {
    const double s = snapshot_times[k];
    if (!(s >= 0.0 && s <= t_final)) throw InvalidArgument("trajectory: snapshot time outside [0, t_final]");
    if (k > 0 && !(s > snapshot_times[k - 1]))
      throw InvalidArgument("trajectory: snapshot times must be strictly increasing");
  }
}

std::string TrajectoryRecord::to_json_line() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["index"] = index;
  j["dark_segments"] = dark_segments;
  nlohmann::json jumps_json = nlohmann::json::array();
  for (const auto& e : jumps) jumps_json.push_back({e.time, e.channel});
  j["jumps"] = std::move(jumps_json);
  nlohmann::json snaps = nlohmann::json::array();
  for (const auto& s : snapshots) {
    std::vector<double> sz(s.magnetization.data(), s.magnetization.data() + s.magnetization.size());
    snaps.push_back({{"t", s.time}, {"sz", sz}, {"S", s.entropy}});
  }
  j["snapshots"] = std::move(snaps);
  return j.dump();
}

TrajectoryRecord TrajectoryRecord::from_json_line(const std::string& line) {
  TrajectoryRecord r;
  try {
    const auto j = nlohmann::json::parse(line);
    r.seed = j.at("seed").get<std::uint64_t>();
    r.index = j.at("index").get<std::uint64_t>();
    r.dark_segments = j.value("dark_segments", std::size_t{0});
    for (const auto& e : j.at("jumps")) r.jumps.push_back({e.at(0).get<double>(), e.at(1).get<int>()});
    for (const auto& s : j.at("snapshots")) {
      Snapshot snap;
      snap.time = s.at("t").get<double>();
      const auto sz = s.at("sz").get<std::vector<double>>();
      snap.magnetization = Eigen::Map<const RVector>(sz.data(), static_cast<Index>(sz.size()));
      snap.entropy = s.at("S").get<double>();
      r.snapshots.push_back(std::move(snap));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("trajectory record: ") + e.what());
  }
  return r;
}

JumpSystem::JumpSystem(const SparseOperator& h, std::vector<SparseOperator> jumps,
                       std::shared_ptr<const SectorBasis> basis, double dt_max, double threshold)
    : h_eff_(effective_hamiltonian(h, jumps)),
      jumps_(std::move(jumps)),
      basis_(std::move(basis)),
      prop_(h_eff_.linear_map(), ellipse_for(h_eff_), dt_max, threshold) {
  if (!basis_ || basis_->size() != h.dim())
    throw InvalidArgument("JumpSystem: basis does not match the Hamiltonian");
}

WaitingTime find_norm_crossing(const FaberPropagator& prop, const CVector& psi, double target_norm2,
                               double t0, double t_max, double norm_tol) {
  WaitingTime out;
  CVector cur = psi;
  double n_cur = cur.squaredNorm();
  if (n_cur <= target_norm2) {
    out.time = t0;
    out.state = std::move(cur);
    out.t = t0;
    return out;
  }
  const double dt = prop.dt();
  double t = t0;
  for (long k = 0; t < t_max; ++k) {
    const bool full = t0 + (k + 1) * dt <= t_max;
    const double h = full ? dt : t_max - t;
    if (!(h > 0.0)) break;
    CVector next = full ? CVector(prop.step(cur)) : CVector(prop.advance(cur, h));
    const double n_next = next.squaredNorm();
    if (n_next > n_cur + 1e-12 * std::max(1.0, n_cur))
      throw NumericalError("waiting time: squared norm increased between steps");
    if (n_next <= target_norm2) {
      double lo = 0.0;
      double hi = h;
      CVector best = std::move(next);
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        CVector v = prop.advance(cur, mid);
        const double nm = v.squaredNorm();
        if (std::abs(nm - target_norm2) <= norm_tol) {
          hi = mid;
          best = std::move(v);
          break;
        }
        if (nm > target_norm2) {
          lo = mid;
        } else {
          hi = mid;
          best = std::move(v);
        }
      }
      out.time = t + hi;
      out.t = t + hi;
      out.state = std::move(best);
      return out;
    }
    cur = std::move(next);
    n_cur = n_next;
    t = full ? t0 + (k + 1) * dt : t_max;
  }
  out.state = std::move(cur);
  out.t = t_max;
  return out;
}

WaitingTime sample_waiting_time(const FaberPropagator& prop, const CVector& psi, double r,
                                double t0, double t_max, double norm_tol) {
  if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("sample_waiting_time: r must lie in (0, 1)");
  return find_norm_crossing(prop, psi, (1.0 - r) * psi.squaredNorm(), t0, t_max, norm_tol);
}

std::vector<double> jump_rates(const CVector& psi, const std::vector<SparseOperator>& jumps) {
  std::vector<double> rates;
  rates.reserve(jumps.size());
  for (const auto& L : jumps) rates.push_back((L * psi).squaredNorm());
  return rates;
}

int select_channel(const std::vector<double>& rates, double u) {
  CompensatedSum total;
  for (double r : rates) total.add(r);
  const double sum = total.value();
  if (!(sum > 0.0)) throw NumericalError("select_channel: every jump rate vanishes");
  const double x = u * sum;
  double acc = 0.0;
  int last_positive = -1;
  for (std::size_t k = 0; k < rates.size(); ++k) {
    if (rates[k] <= 0.0) continue;
    last_positive = static_cast<int>(k);
    acc += rates[k];
    if (x < acc) return last_positive;
  }
  return last_positive;
}

int select_channel(const CVector& psi, const std::vector<SparseOperator>& jumps, double u) {
  return select_channel(jump_rates(psi, jumps), u);
}

CVector apply_jump(const CVector& psi, const SparseOperator& L) {
  CVector out = L * psi;
  const double n = out.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("apply_jump: jump annihilates the state");
  return out / n;
}

Snapshot take_snapshot(const CVector& psi, const SectorBasis& basis, double t, int entropy_cut) {
  const std::shared_ptr<const SectorBasis> view(std::shared_ptr<const SectorBasis>{}, &basis);
  ManyBodyState s{psi / psi.norm(), view};
  Snapshot snap;
  snap.time = t;
  snap.magnetization = magnetization_profile(s);
  const int cut = entropy_cut < 0 ? basis.n_sites() / 2 : entropy_cut;
  snap.entropy = cut == 0 ? 0.0 : bipartite_entropy(s, cut);
  return snap;
}

TrajectoryRecord run_trajectory(const TrajectoryConfig& config, const JumpSystem& system,
                                const CVector& initial, std::uint64_t index) {
  config.validate();
  if (initial.size() != system.h_eff().dim())
    throw InvalidArgument("run_trajectory: initial state has the wrong dimension");
  if (std::abs(config.dt_max - system.propagator().dt()) > 1e-15 * config.dt_max)
    throw InvalidArgument("run_trajectory: config dt_max differs from the system propagator");
  const double n0 = initial.norm();
  if (!(n0 > 0.0)) throw InvalidArgument("run_trajectory: zero initial state");

  StreamRng rng(config.seed, index);
  TrajectoryRecord rec;
  rec.seed = config.seed;
  rec.index = index;

  const auto& snaps = config.snapshot_times;
  const SectorBasis& basis = *system.basis();
  std::size_t si = 0;
  double t = 0.0;
  CVector phi = initial / n0;
  double target = 1.0 - rng.uniform();

  while (true) {
    const double horizon = si < snaps.size() ? std::min(snaps[si], config.t_final) : config.t_final;
    WaitingTime wt;
    if (horizon > t) {
      wt = find_norm_crossing(system.propagator(), phi, target, t, horizon, config.norm_tol);
    } else {
      wt.state = phi;
      wt.t = t;
    }
    if (wt.time) {
      t = *wt.time;
      const std::vector<double> rates = jump_rates(wt.state, system.jumps());
      const int mu = select_channel(rates, rng.uniform());
      phi = apply_jump(wt.state, system.jumps()[static_cast<std::size_t>(mu)]);
      rec.jumps.push_back({t, mu});
      target = 1.0 - rng.uniform();
      continue;
    }
    phi = std::move(wt.state);
    t = horizon;
    if (si < snaps.size() && horizon == snaps[si]) {
      rec.snapshots.push_back(take_snapshot(phi, basis, t, config.entropy_cut));
      ++si;
    }
    if (t >= config.t_final && si >= snaps.size()) break;
  }

  // Dark end state: every channel annihilates the final conditional state.
  double total = 0.0;
  for (double r : jump_rates(phi, system.jumps())) total += r;
  if (total <= 1e-300 * phi.squaredNorm()) rec.dark_segments = 1;
  return rec;
}

std::vector<TrajectoryRecord> run_ensemble(const TrajectoryConfig& config, const JumpSystem& system,
                                           const CVector& initial, std::size_t count,
                                           unsigned threads) {
  config.validate();
  std::vector<TrajectoryRecord> out(count);
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        out[i] = run_trajectory(config, system, initial, i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::pair<double, double> mean_and_stderr(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  CompensatedSum s;
  for (double v : values) s.add(v);
  const double n = static_cast<double>(values.size());
  const double mean = s.value() / n;
  if (values.size() < 2) return {mean, 0.0};
  CompensatedSum q;
  for (double v : values) q.add((v - mean) * (v - mean));
  const double var = q.value() / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

EnsembleCurve ensemble_average(const std::vector<TrajectoryRecord>& records,
                               const std::function<double(const Snapshot&)>& observable) {
  EnsembleCurve curve;
  curve.samples = records.size();
  if (records.empty()) return curve;
  const std::size_t n_snap = records.front().snapshots.size();
  for (const auto& r : records)
    if (r.snapshots.size() != n_snap)
      throw InvalidArgument("ensemble_average: records have different snapshot counts");
  std::vector<double> values(records.size());
  for (std::size_t k = 0; k < n_snap; ++k) {
    for (std::size_t i = 0; i < records.size(); ++i) values[i] = observable(records[i].snapshots[k]);
    const auto [m, se] = mean_and_stderr(values);
    curve.times.push_back(records.front().snapshots[k].time);
    curve.mean.push_back(m);
    curve.stderr_.push_back(se);
  }
  return curve;
}

EnsembleCurve conditional_entropy_average(const std::vector<TrajectoryRecord>& records) {
  return ensemble_average(records, [](const Snapshot& s) { return s.entropy; });
}

}  // namespace faberdyn
