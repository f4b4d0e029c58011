#include "faberdyn/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

#include <json.hpp>

#include "faberdyn/gaussian.hpp"
#include "faberdyn/manybody.hpp"
#include "faberdyn/oracles.hpp"
#include "faberdyn/trajectories.hpp"
#include "faberdyn/version.hpp"

namespace faberdyn {

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

ModelParams model_params(const Config& cfg) {
  ModelParams p;
  p.J = cfg.get_double("model.J");
  p.gamma = cfg.get_double("model.gamma");
  p.delta = cfg.get_double("model.delta");
  const long long L = cfg.get_int("model.L");
  if (L < 2 || L > 4096) throw ConfigError("model.L", "model.L must lie in [2, 4096]");
  p.L = static_cast<int>(L);
  try {
    p.boundary = boundary_from_string(cfg.get_string("model.boundary"));
  } catch (const InvalidArgument& e) {
    throw ConfigError("model.boundary", e.what());
  }
  if (!(p.J > 0.0)) throw ConfigError("model.J", "model.J must be > 0");
  return p;
}

struct TimeGrid {
  double dt = 0.1;
  long steps = 0;
  std::vector<long> sample_steps;  // includes 0
};

TimeGrid time_grid(const Config& cfg) {
  TimeGrid g;
  g.dt = cfg.get_double("time.dt");
  const double t_final = cfg.get_double("time.t_final");
  const long long samples = cfg.get_int("time.samples");
  if (!(g.dt > 0.0)) throw ConfigError("time.dt", "time.dt must be > 0");
  if (!(t_final >= 0.0)) throw ConfigError("time.t_final", "time.t_final must be >= 0");
  if (samples < 1) throw ConfigError("time.samples", "time.samples must be >= 1");
  const double ratio = t_final / g.dt;
  g.steps = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(g.steps)) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError("time.dt", "time.t_final must be an integer multiple of time.dt");
  std::set<long> s{0};
  for (long long k = 1; k <= samples; ++k)
    s.insert(std::lround(static_cast<double>(k) * static_cast<double>(g.steps) / static_cast<double>(samples)));
  g.sample_steps.assign(s.begin(), s.end());
  return g;
}

FaberPropagator make_propagator(const SparseOperator& op, const SpectralBounds& bounds,
                                const Config& cfg, double dt, const char* order_key = "propagator.order") {
  const double margin = cfg.get_double("propagator.margin");
  if (!(margin >= 0.0)) throw ConfigError("propagator.margin", "propagator.margin must be >= 0");
  const EllipseParams e = propagation_ellipse(bounds, margin);
  const long long order = cfg.get_int(order_key);
  if (order < 0) throw ConfigError(order_key, std::string(order_key) + " must be >= 0");
  if (order > 0) return FaberPropagator(op.linear_map(), e, dt, static_cast<int>(order));
  const double thr = cfg.get_double("propagator.threshold");
  if (!(thr > 0.0 && thr < 1.0)) throw ConfigError("propagator.threshold", "threshold must lie in (0, 1)");
  return FaberPropagator(op.linear_map(), e, dt, thr);
}

struct GaussianSeries {
  std::vector<double> times;
  std::vector<CMatrix> C;
};

GaussianSeries run_gaussian(GaussianState state, const FaberPropagator& prop, const TimeGrid& grid,
                            long renorm_every) {
  GaussianSeries out;
  std::size_t next = 0;
  for (long s = 0; s <= grid.steps; ++s) {
    if (s > 0) {
      const bool qr = (s % renorm_every == 0) || s == grid.steps ||
                      (next < grid.sample_steps.size() && grid.sample_steps[next] == s);
      state = evolve_step(state, prop, qr);
    }
    if (next < grid.sample_steps.size() && grid.sample_steps[next] == s) {
      out.times.push_back(static_cast<double>(s) * grid.dt);
      out.C.push_back(correlation_matrix(state));
      ++next;
    }
  }
  return out;
}

long renorm_period(const Config& cfg) {
  const long long r = cfg.get_int("gaussian.renormalize_every");
  if (r < 1) throw ConfigError("gaussian.renormalize_every", "gaussian.renormalize_every must be >= 1");
  return static_cast<long>(r);
}

SparseOperator hn_operator(const ModelParams& p, SpectralBounds& bounds) {
  SparseOperator h = build_hn_single_particle(p);
  bounds = tightened_bounds(h, hn_analytic_bounds(p));
  return h;
}

void require_even_L(const ModelParams& p) {
  if (p.L % 2 != 0) throw ConfigError("model.L", "this experiment needs an even model.L");
}

// ---------------------------------------------------------------------------

ExperimentResult run_benchmark_cdw(const Config& cfg, unsigned) {
  const ModelParams p = model_params(cfg);
  require_even_L(p);
  const TimeGrid grid = time_grid(cfg);
  SpectralBounds bounds;
  const SparseOperator h = hn_operator(p, bounds);
  const FaberPropagator prop = make_propagator(h, bounds, cfg, grid.dt);
  const long renorm = renorm_period(cfg);

  ExperimentResult res;
  res.polynomial_orders["hn"] = prop.order();
  const GaussianSeries a = run_gaussian(init_cdw(p.L), prop, grid, renorm);

  const long long cmp = cfg.get_int("propagator.compare_order");
  GaussianSeries b;
  if (cmp > 0) {
    const FaberPropagator prop2 = make_propagator(h, bounds, cfg, grid.dt, "propagator.compare_order");
    res.polynomial_orders["hn_compare"] = prop2.order();
    b = run_gaussian(init_cdw(p.L), prop2, grid, renorm);
  }

  Table ent{"entropy", {"t", "S_half", "S_half_compare", "abs_diff"}, {}};
  Table dens{"density", {"t", "site", "n"}, {}};
  Table cur{"current", {"t", "bond", "I"}, {}};
  double max_diff = 0.0;
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    const double s = entanglement_entropy(a.C[k], 0, p.L / 2);
    const double s2 = cmp > 0 ? entanglement_entropy(b.C[k], 0, p.L / 2)
                              : std::numeric_limits<double>::quiet_NaN();
    const double d = cmp > 0 ? std::abs(s - s2) : std::numeric_limits<double>::quiet_NaN();
    if (cmp > 0) max_diff = std::max(max_diff, d);
    ent.add({a.times[k], s, s2, d});
    const RVector n = density_profile(a.C[k]);
    for (int l = 0; l < p.L; ++l) dens.add({a.times[k], static_cast<double>(l), n(l)});
    const RVector I = current_profile(a.C[k], p.J);
    for (int l = 0; l + 1 < p.L; ++l) cur.add({a.times[k], static_cast<double>(l), I(l)});
  }
  const RVector I_end = current_profile(a.C.back(), p.J);
  res.summary["bulk_current_final"] = I_end.segment(p.L / 4, p.L / 2).mean();
  if (cmp > 0) res.summary["max_entropy_difference"] = max_diff;
  res.tables = {ent, dens, cur};
  return res;
}

ExperimentResult run_hn_domain_wall(const Config& cfg, unsigned) {
  const ModelParams p = model_params(cfg);
  require_even_L(p);
  const TimeGrid grid = time_grid(cfg);
  SpectralBounds bounds;
  const SparseOperator h = hn_operator(p, bounds);
  const FaberPropagator prop = make_propagator(h, bounds, cfg, grid.dt);
  ExperimentResult res;
  res.polynomial_orders["hn"] = prop.order();
  const GaussianSeries s = run_gaussian(init_domain_wall(p.L), prop, grid, renorm_period(cfg));

  Table dens{"density", {"t", "site", "n"}, {}};
  Table front{"front", {"t", "penetration"}, {}};
  double max_pen = 0.0;
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    const RVector n = density_profile(s.C[k]);
    for (int l = 0; l < p.L; ++l) dens.add({s.times[k], static_cast<double>(l), n(l)});
    // First site from which the density stays below 0.05, measured from the wall bond.
    int first = p.L;
    while (first > 0 && n(first - 1) < 0.05) --first;
    const double pen = static_cast<double>(first) - 0.5 * p.L;
    max_pen = std::max(max_pen, pen);
    front.add({s.times[k], pen});
  }
  res.summary["effective_length"] = effective_length(p, p.L);
  res.summary["max_penetration"] = max_pen;
  res.tables = {dens, front};
  return res;
}

ExperimentResult run_ghd_compare(const Config& cfg, unsigned) {
  const ModelParams p = model_params(cfg);
  require_even_L(p);
  const TimeGrid grid = time_grid(cfg);
  SpectralBounds bounds;
  const SparseOperator h = hn_operator(p, bounds);
  const FaberPropagator prop = make_propagator(h, bounds, cfg, grid.dt);
  ExperimentResult res;
  res.polynomial_orders["hn"] = prop.order();
  const GaussianSeries s = run_gaussian(init_domain_wall(p.L), prop, grid, renorm_period(cfg));
  const GhdPrediction ghd = ghd_predict(p);
  const double half = 0.5 * p.L;

  std::vector<double> xs(static_cast<std::size_t>(p.L));
  for (int l = 0; l < p.L; ++l) xs[l] = l + 0.5 - half;

  Table front{"front", {"t", "x_quarter", "x_three_quarter"}, {}};
  std::vector<double> ft, fx;
  for (std::size_t k = 1; k < s.times.size(); ++k) {
    const RVector n = density_profile(s.C[k]);
    const double xr = level_crossing(xs, n, 0.25, static_cast<std::size_t>(half), 1);
    const double xl = level_crossing(xs, n, 0.75, static_cast<std::size_t>(half) - 1, -1);
    front.add({s.times[k], xr, xl});
    if (std::isfinite(xr) && std::isfinite(xl) && s.times[k] >= 0.25 * s.times.back()) {
      ft.push_back(s.times[k]);
      fx.push_back(0.5 * (xr - xl));
    }
  }
  if (ft.size() >= 2)
    res.summary["v_eff_front_slope"] = linear_fit(ft, fx).first / std::cos(0.25 * std::acos(-1.0));
  res.summary["v_eff_predicted"] = ghd.v_eff;

  const double t = s.times.back();
  const CMatrix& C = s.C.back();
  const RVector n = density_profile(C);
  if (t > 0.0) res.summary["v_eff_fit"] = fit_front_velocity(xs, n, t, 1e-3 * p.J, 2.0 * p.J);
  const RVector I = current_profile(C, p.J);
  Table sites{"density", {"site", "x", "n_sim", "n_ghd"}, {}};
  for (int l = 0; l < p.L; ++l) sites.add({static_cast<double>(l), xs[l], n(l), ghd.at(xs[l], t).density});
  Table bonds{"bonds", {"bond", "x", "I_sim", "I_ghd", "S_sim", "S_ghd"}, {}};
  for (int l = 0; l + 1 < p.L; ++l) {
    const double x = l + 1.0 - half;
    const GhdPoint g = ghd.at(x, t);
    bonds.add({static_cast<double>(l), x, I(l), g.current, entanglement_entropy(C, 0, l + 1), g.entropy});
  }
  res.tables = {sites, bonds, front};
  return res;
}

ExperimentResult run_interacting(const Config& cfg, bool neel) {
  const ModelParams p = model_params(cfg);
  if (p.boundary != Boundary::Open) throw ConfigError("model.boundary", "many-body chains are open");
  if (p.L > 24) throw ConfigError("model.L", "many-body runs are capped at L = 24");
  if (!neel) require_even_L(p);
  const TimeGrid grid = time_grid(cfg);
  auto basis = std::make_shared<const SectorBasis>(SectorBasis::sector(p.L, neel ? (p.L + 1) / 2 : p.L / 2));
  const SparseOperator H = build_xxz_nonreciprocal(p, *basis);
  const SpectralBounds bounds = tightened_bounds(H, xxz_analytic_bounds(p));
  const FaberPropagator prop = make_propagator(H, bounds, cfg, grid.dt);
  ExperimentResult res;
  res.polynomial_orders["xxz"] = prop.order();

  ManyBodyState psi = neel ? neel_state(basis) : dw_state(basis);
  Table mag{"magnetization", {"t", "site", "sz"}, {}};
  Table cur{"current", {"t", "bond", "I"}, {}};
  Table ent{"entropy", {"t", "S_half"}, {}};
  std::vector<double> times, edge;
  std::vector<RVector> profiles;
  std::size_t next = 0;
  for (long s = 0; s <= grid.steps; ++s) {
    if (s > 0) psi = evolve_step(psi, prop);
    if (next < grid.sample_steps.size() && grid.sample_steps[next] == s) {
      const double t = static_cast<double>(s) * grid.dt;
      const RVector sz = magnetization_profile(psi);
      const RVector I = spin_current_profile(psi, p.J);
      for (int l = 0; l < p.L; ++l) mag.add({t, static_cast<double>(l), sz(l)});
      for (int l = 0; l + 1 < p.L; ++l) cur.add({t, static_cast<double>(l), I(l)});
      ent.add({t, bipartite_entropy(psi, p.L / 2)});
      times.push_back(t);
      profiles.push_back(sz);
      edge.push_back(sz(p.gamma >= 0.0 ? 0 : p.L - 1));
      ++next;
    }
  }
  const double tau = estimate_tau_star(times, edge, cfg.get_double("analysis.tau_fraction"));
  const RVector avg = time_averaged_profile(times, profiles, tau, times.back() - tau);
  Table av{"averaged_profile", {"site", "sz_avg"}, {}};
  for (int l = 0; l < p.L; ++l) av.add({static_cast<double>(l), avg(l)});
  res.summary["tau_star"] = tau;
  res.tables = {mag, cur, ent, av};
  return res;
}

ExperimentResult run_traj(const Config& cfg, unsigned threads, bool model_a) {
  ModelParams p = model_params(cfg);
  if (p.boundary != Boundary::Open) throw ConfigError("model.boundary", "many-body chains are open");
  if (p.L > (model_a ? 14 : 20)) throw ConfigError("model.L", "trajectory runs are capped at desk scale");
  if (!model_a && p.gamma < 0.0) throw ConfigError("model.gamma", "model B needs gamma >= 0");

  TrajectoryConfig tc;
  tc.seed = cfg.get_u64("trajectories.seed");
  tc.dt_max = cfg.get_double("trajectories.dt_max");
  tc.norm_tol = cfg.get_double("trajectories.norm_tol");
  tc.t_final = cfg.get_double("time.t_final");
  tc.threshold = cfg.get_double("propagator.threshold");
  tc.entropy_cut = static_cast<int>(cfg.get_int("trajectories.entropy_cut"));
  const long long samples = cfg.get_int("time.samples");
  if (samples < 1) throw ConfigError("time.samples", "time.samples must be >= 1");
  for (long long k = 0; k <= samples; ++k) tc.snapshot_times.push_back(tc.t_final * static_cast<double>(k) / samples);
  try {
    tc.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("trajectories.dt_max", e.what());
  }
  const long long count = cfg.get_int("trajectories.count");
  if (count < 1) throw ConfigError("trajectories.count", "trajectories.count must be >= 1");
  const long long cfg_threads = cfg.get_int("trajectories.threads");
  if (cfg_threads < 0) throw ConfigError("trajectories.threads", "trajectories.threads must be >= 0");
  if (cfg_threads > 0) threads = static_cast<unsigned>(cfg_threads);

  ModelParams hp = p;
  hp.gamma = 0.0;
  std::shared_ptr<const SectorBasis> basis;
  std::vector<SparseOperator> jumps;
  if (model_a) {
    basis = std::make_shared<const SectorBasis>(SectorBasis::full(p.L));
    jumps = build_model_a_jumps(p);
  } else {
    basis = std::make_shared<const SectorBasis>(SectorBasis::sector(p.L, (p.L + 1) / 2));
    jumps = build_model_b_jumps(p, *basis);
  }
  const SparseOperator H = build_xxz_nonreciprocal(hp, *basis);
  const JumpSystem sys(H, jumps, basis, tc.dt_max, tc.threshold);
  const CVector psi0 = neel_state(basis).amplitudes;
  const auto records = run_ensemble(tc, sys, psi0, static_cast<std::size_t>(count), std::max(1u, threads));

  ExperimentResult res;
  res.polynomial_orders["h_eff"] = sys.propagator().order();
  Table mag{"magnetization", {"t", "site", "mean", "stderr"}, {}};
  for (int l = 0; l < p.L; ++l) {
    const EnsembleCurve c = ensemble_average(records, [l](const Snapshot& s) { return s.magnetization(l); });
    for (std::size_t k = 0; k < c.times.size(); ++k) mag.add({c.times[k], static_cast<double>(l), c.mean[k], c.stderr_[k]});
  }
  std::sort(mag.rows.begin(), mag.rows.end());
  const EnsembleCurve ent = conditional_entropy_average(records);
  Table et{"entropy", {"t", "mean", "stderr"}, {}};
  for (std::size_t k = 0; k < ent.times.size(); ++k) et.add({ent.times[k], ent.mean[k], ent.stderr_[k]});
  Table jumps_t{"jumps", {"trajectory", "time", "channel"}, {}};
  for (const auto& r : records)
    for (const auto& e : r.jumps) jumps_t.add({static_cast<double>(r.index), e.time, static_cast<double>(e.channel)});
  double peak = 0.0;
  for (double v : ent.mean) peak = std::max(peak, v);
  res.summary["entropy_peak"] = peak;
  res.summary["entropy_final"] = ent.mean.back();
  res.summary["entropy_final_stderr"] = ent.stderr_.back();
  res.tables = {mag, et, jumps_t};
  std::string lines;
  for (const auto& r : records) lines += r.to_json_line() + '\n';
  res.text_files["records.jsonl"] = std::move(lines);
  return res;
}

ExperimentResult run_spectra(const Config& cfg, unsigned) {
  const ModelParams p = model_params(cfg);
  if (p.L > 2048) throw ConfigError("model.L", "dense spectra are capped at L = 2048");
  const SparseOperator h = build_hn_single_particle(p);
  const bool obc = p.boundary == Boundary::Open;
  HnSpectrum closed;
  try {
    closed = obc ? hn_obc_spectrum(p) : hn_pbc_spectrum(p);
  } catch (const InvalidArgument& e) {
    throw ConfigError("model.gamma", e.what());
  }
  const DenseEigen dense = dense_eigensolve(h.to_dense(), obc);

  // Greedy nearest matching of dense eigenvalues onto the closed-form list.
  std::vector<bool> used(static_cast<std::size_t>(dense.values.size()), false);
  Table t{"spectrum", {"n", "re_closed", "im_closed", "re_dense", "im_dense", "abs_diff"}, {}};
  double worst = 0.0;
  for (std::size_t n = 0; n < closed.energies.size(); ++n) {
    Index best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < dense.values.size(); ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double d = std::abs(dense.values(j) - closed.energies[n]);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    worst = std::max(worst, bd);
    const cplx e = closed.energies[n];
    const cplx d = dense.values(best);
    t.add({static_cast<double>(obc ? n + 1 : n), e.real(), e.imag(), d.real(), d.imag(), bd});
  }
  ExperimentResult res;
  res.summary["max_abs_diff"] = worst;
  res.summary["localization_length"] = localization_length(p);
  if (obc && std::abs(p.gamma) < p.J) {
    res.summary["theta_closed"] = closed.theta.real();
    std::vector<double> rates;
    for (Index j = 0; j < dense.right.cols(); ++j) rates.push_back(envelope_log_rate(dense.right.col(j)));
    std::sort(rates.begin(), rates.end());
    res.summary["theta_measured_median"] = rates[rates.size() / 2];
  }
  res.tables = {t};
  return res;
}

std::vector<ExperimentInfo> build_registry() {
  std::vector<ExperimentInfo> r;
  r.push_back({"benchmark_cdw",
               "half-chain entropy, density and bond current after a charge-density-wave quench "
               "of the open non-reciprocal chain, with a second polynomial order for convergence",
               {{"model.L", "100"}, {"model.gamma", "-0.8"}, {"time.t_final", "50"}, {"time.dt", "0.1"},
                {"time.samples", "100"}, {"propagator.order", "64"}, {"propagator.compare_order", "128"}},
               [](const Config& c, unsigned th) { return run_benchmark_cdw(c, th); }});
  r.push_back({"hn_domain_wall",
               "space-time density of a melting domain wall in the open non-reciprocal chain and "
               "the stalled penetration depth",
               {{"model.L", "256"}, {"model.gamma", "0.5"}, {"time.t_final", "200"}, {"time.dt", "0.1"},
                {"time.samples", "200"}},
               [](const Config& c, unsigned th) { return run_hn_domain_wall(c, th); }});
  r.push_back({"ghd_compare",
               "density, current and entropy profiles of the melting domain wall against the "
               "hydrodynamic closed forms with the renormalised velocity, plus front velocity",
               {{"model.L", "256"}, {"model.gamma", "0.2"}, {"time.t_final", "40"}, {"time.dt", "0.05"},
                {"time.samples", "40"}},
               [](const Config& c, unsigned th) { return run_ghd_compare(c, th); }});
  r.push_back({"interacting_neel",
               "magnetisation, spin current and entropy of the interacting non-reciprocal chain "
               "from a Neel state, and the long-time averaged profile",
               {{"model.L", "12"}, {"model.gamma", "0.8"}, {"model.delta", "0"}, {"time.t_final", "40"},
                {"time.dt", "0.05"}, {"time.samples", "400"}},
               [](const Config& c, unsigned) { return run_interacting(c, true); }});
  r.push_back({"interacting_dw",
               "magnetisation and entropy of the interacting non-reciprocal chain from a domain wall",
               {{"model.L", "12"}, {"model.gamma", "0.8"}, {"model.delta", "1"}, {"time.t_final", "20"},
                {"time.dt", "0.05"}, {"time.samples", "200"}},
               [](const Config& c, unsigned) { return run_interacting(c, false); }});
  r.push_back({"model_a_traj",
               "trajectory-averaged magnetisation and conditional half-chain entropy under "
               "single-site and bond lowering jumps (full Hilbert space)",
               {{"model.L", "8"}, {"model.gamma", "0.8"}, {"time.t_final", "20"}, {"time.samples", "40"},
                {"trajectories.count", "200"}},
               [](const Config& c, unsigned th) { return run_traj(c, th, true); }});
  r.push_back({"model_b_traj",
               "trajectory-averaged magnetisation and conditional half-chain entropy under directed "
               "spin-flip jumps (fixed magnetisation sector)",
               {{"model.L", "8"}, {"model.gamma", "0.8"}, {"time.t_final", "20"}, {"time.samples", "40"},
                {"trajectories.count", "200"}},
               [](const Config& c, unsigned th) { return run_traj(c, th, false); }});
  r.push_back({"spectra",
               "single-particle spectrum of the non-reciprocal chain, dense solver against closed "
               "forms, with the measured eigenvector localisation rate",
               {{"model.L", "64"}, {"model.gamma", "0.5"}, {"model.boundary", "obc"}},
               [](const Config& c, unsigned th) { return run_spectra(c, th); }});
  return r;
}

}  // namespace

void Table::add(std::vector<double> row) {
  if (row.size() != columns.size()) throw InvalidArgument("Table::add: row width mismatch in " + name);
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += columns[c];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> registry = build_registry();
  return registry;
}

const ExperimentInfo& find_experiment(const std::string& name) {
  for (const auto& e : experiment_registry())
    if (e.name == name) return e;
  throw ConfigError("experiment", "unknown experiment '" + name + "'");
}

Config with_experiment_defaults(const Config& config) {
  const ExperimentInfo& info = find_experiment(config.get_string("experiment"));
  Config out = config;
  for (const auto& [k, v] : info.defaults)
    if (!config.is_set(k)) out.set(k, v);
  return out;
}

RunReport run_experiment(const Config& config, unsigned threads) {
  const auto start = std::chrono::steady_clock::now();
  const Config cfg = with_experiment_defaults(config);
  const ExperimentInfo& info = find_experiment(cfg.get_string("experiment"));

  RunReport report;
  report.output_dir = cfg.get_string("output");
  if (report.output_dir.empty()) throw ConfigError("output", "output directory must not be empty");
  report.result = info.run(cfg, threads);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(report.output_dir, ec);
  if (ec) throw ConfigError("output", "cannot create output directory: " + ec.message());
  for (const auto& t : report.result.tables) {
    const fs::path path = fs::path(report.output_dir) / (t.name + ".csv");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("output", "cannot write " + path.string());
    f << t.to_csv();
    report.files.push_back(path.string());
  }
  for (const auto& [fname, text] : report.result.text_files) {
    const fs::path path = fs::path(report.output_dir) / fname;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("output", "cannot write " + path.string());
    f << text;
    report.files.push_back(path.string());
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  nlohmann::ordered_json m;
  m["experiment"] = info.name;
  m["figure"] = info.figure;
  nlohmann::ordered_json c = nlohmann::ordered_json::object();
  for (const auto& [k, v] : cfg.resolved()) c[k] = v;
  m["config"] = c;
  m["git_describe"] = kGitDescribe;
  m["threads"] = threads;
  m["wall_time_seconds"] = report.wall_seconds;
  m["polynomial_orders"] = report.result.polynomial_orders;
  nlohmann::ordered_json s = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.result.summary) s[k] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(format_double(v));
  m["summary"] = s;
  std::vector<std::string> names;
  for (const auto& t : report.result.tables) names.push_back(t.name + ".csv");
  for (const auto& kv : report.result.text_files) names.push_back(kv.first);
  m["outputs"] = names;
  const fs::path mpath = fs::path(report.output_dir) / "manifest.json";
  std::ofstream mf(mpath, std::ios::binary);
  if (!mf) throw ConfigError("output", "cannot write " + mpath.string());
  mf << m.dump(2) << '\n';
  report.files.push_back(mpath.string());
  return report;
}

}  // namespace faberdyn
