#pragma once

#include <fftw3.h>
#include <openssl/crypto.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "gauge2d.hpp"
#include "interferometer.hpp"
#include "io/svg.hpp"
#include "io/table.hpp"
#include "shaking.hpp"
#include "spectrum.hpp"

namespace susyq {

inline constexpr const char* version = "1.0.0";

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_numerical = 2, exit_io = 3 };

/// --out beats SUSYQ_OUT beats the config's `output`, which beats ./susyq_out.
inline std::filesystem::path resolve_output_dir(const std::optional<std::string>& cli_out, const char* env,
                                                const RunConfig* cfg) {
  if (cli_out && !cli_out->empty()) return *cli_out;
  if (env && *env) return env;
  if (cfg && !cfg->output.empty()) return cfg->output;
  return "susyq_out";
}

namespace cli {

/// Writes files into the output directory and records each in the manifest.
class Artifacts {
 public:
  explicit Artifacts(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  const std::filesystem::path& dir() const { return dir_; }

  /// Returns the content hash.
  std::string put(const std::string& name, const std::string& content) {
    io::write_file(dir_ / name, content);
    auto hash = io::sha256_hex(content);
    files_.push_back({{"path", name}, {"sha256", hash}, {"bytes", content.size()}});
    return hash;
  }

  std::string table(const std::string& name, const io::Table& t) {
    if (t.empty()) throw NumericalError("refusing to write empty dataset " + name);
    return put(name, t.render());
  }

  const nlohmann::json& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  nlohmann::json files_ = nlohmann::json::array();
};

struct Outcome {
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> flags;
};

inline double periods(double t) { return t / two_pi; }

inline HarmonicGaussian require_harmonic_gaussian(const RunConfig& c) {
  if (auto* hg = std::get_if<HarmonicGaussian>(&c.superpotential)) return *hg;
  throw ConfigError("superpotential.kind: scenario '" + c.scenario + "' needs harmonic_gaussian");
}

inline std::vector<double> range(double lo, double hi, double step) { return linspace_step(lo, hi, step); }

inline ProtocolConfig protocol_config(const RunConfig& c) {
  auto hg = require_harmonic_gaussian(c);
  ProtocolConfig p;
  p.grid = c.grid1d();
  p.dt = c.dt();
  p.xbar = c.protocol.xbar;
  p.A = hg.A;
  p.sigma = hg.sigma;
  p.t_r = c.protocol.t_r_periods * two_pi;
  p.ramp_up = c.protocol.ramp_up_periods * two_pi;
  p.ramp_down = c.protocol.ramp_down_periods * two_pi;
  p.eta = c.protocol.eta;
  if (c.protocol.mode == "exact_x") p.mode = OperatorMode::exact_x;
  else if (c.protocol.mode == "shaking") p.mode = OperatorMode::shaking;
  else p.mode = OperatorMode::exact_Bdag;
  return p;
}

inline OptimizerOptions optimizer_options(const RunConfig& c, double sigma_t) {
  OptimizerOptions o;
  o.box.product_max = c.shaking.product_max_periods * two_pi;
  o.coarse_points = c.shaking.coarse_points;
  o.coarse_n = c.shaking.coarse_n;
  o.coarse_dt = two_pi / static_cast<double>(c.shaking.coarse_steps_per_period);
  o.sigma_t = sigma_t;
  o.tolerance = c.shaking.tolerance;
  o.workers = c.workers;
  return o;
}

/// Arm-1 state just before the second pulse.
inline Wavefunction arm1_before_pulse(const ProtocolConfig& p) {
  return evolve_schedule(displace(fock_state(p.grid, 0), p.xbar),
                         barrier_schedule(p.grid, p.dt, 0.0, p.A, p.sigma, p.timing()))
      .final_state;
}

inline PulseOptimum first_pulse_numeric(const RunConfig& c, const ProtocolConfig& p) {
  double st = c.protocol.pulse_pre.sigma_t_periods * two_pi;
  return optimize_second_pulse(displace(fock_state(p.grid, 0), p.xbar), detail::harmonic_w(), optimizer_options(c, st),
                               p.dt);
}

inline PulseOptimum second_pulse_numeric(const RunConfig& c, const ProtocolConfig& p) {
  double st = c.protocol.pulse_post.sigma_t_periods * two_pi;
  return optimize_second_pulse(arm1_before_pulse(p), detail::harmonic_w(), optimizer_options(c, st), p.dt);
}

inline PulseSpec fixed_pulse(const PulseSection& s) {
  return PulseSpec::from_product(s.dx_sigma_t_periods * two_pi, s.phi_pi * std::numbers::pi, s.sigma_t_periods * two_pi);
}

/// Fills in pulse_pre / pulse_post for shaking mode according to their `source`.
inline void resolve_pulses(const RunConfig& c, ProtocolConfig& p, Outcome& out) {
  if (p.mode != OperatorMode::shaking) return;
  const auto& pre = c.protocol.pulse_pre;
  if (pre.source == "formula") {
    auto f = optimal_first_pulse(p.xbar);
    p.pulse_pre = PulseSpec::from_product(f.dx_sigma_t, f.phi, pre.sigma_t_periods * two_pi);
  } else if (pre.source == "optimize") {
    p.pulse_pre = first_pulse_numeric(c, p).pulse;
  } else {
    p.pulse_pre = fixed_pulse(pre);
  }
  const auto& post = c.protocol.pulse_post;
  if (post.source == "optimize") {
    auto opt = second_pulse_numeric(c, p);
    p.pulse_post = opt.pulse;
    out.summary["pulse_post_fidelity"] = opt.fidelity;
    if (opt.edge_warning) out.summary["pulse_post_edge_warning"] = true;
  } else {
    p.pulse_post = fixed_pulse(post);
  }
  out.summary["pulse_pre"] = {{"dx_sigma_t_periods", periods(p.pulse_pre->product())},
                              {"phi_pi", p.pulse_pre->phi / std::numbers::pi}};
  out.summary["pulse_post"] = {{"dx_sigma_t_periods", periods(p.pulse_post->product())},
                               {"phi_pi", p.pulse_post->phi / std::numbers::pi}};
}

inline void add_flags(Outcome& out, const std::vector<std::string>& flags) {
  out.flags.insert(out.flags.end(), flags.begin(), flags.end());
}

inline Outcome run_spectrum(const RunConfig& c, Artifacts& art) {
  auto hg = require_harmonic_gaussian(c);
  const auto& s = c.spectrum;
  const auto g = c.grid1d();
  const auto etas = range(s.eta_min, s.eta_max, s.eta_step);
  EigenOptions opt{0.5, false, s.richardson};
  auto levels = eta_spectrum_sweep(hg.A, etas, s.levels, g, opt, c.workers, hg.sigma);
  auto zero = eigensolve(eta_potential_fn(0.0, hg.A, hg.sigma), g, s.levels, opt).energies;

  io::Table t;
  t.add_meta("scenario", "spectrum");
  t.add_meta("A", format_double(hg.A));
  t.add_meta("sigma", format_double(hg.sigma));
  t.add_meta("paired", std::to_string(s.paired));
  t.columns = {"eta"};
  for (std::size_t n = 0; n < s.levels; ++n) t.columns.push_back("E" + std::to_string(n));
  t.columns.push_back("mismatch");
  std::vector<double> mismatch;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    std::vector<double> row{etas[i]};
    row.insert(row.end(), levels[i].begin(), levels[i].end());
    mismatch.push_back(eta_pairing_mismatch(levels[i], zero, s.paired));
    row.push_back(mismatch.back());
    t.add_row(std::move(row));
  }
  auto hash = art.table("spectrum.dat", t);

  io::LineFamily plot{"Levels of V_eta", "eta", "energy", etas, {}, {}, {}};
  for (std::size_t n = 0; n < s.levels; ++n) {
    std::vector<double> curve;
    for (const auto& l : levels) curve.push_back(l[n]);
    plot.curves.push_back(std::move(curve));
    plot.curve_labels.push_back("E" + std::to_string(n));
  }
  // Dashed: the η = 0 ladder shifted by one quantum, where the paired levels of V_1 sit.
  for (std::size_t n = 0; n < s.paired; ++n) plot.references.emplace_back(etas.size(), zero[n] + 1.0);
  art.put("spectrum.svg", io::render_svg(plot, hash));

  io::LineFamily mplot{"Pairing mismatch", "eta", "max |E_n+1(eta) - E_n(0) - 1|", etas, {mismatch}, {}, {"mismatch"}};
  art.put("mismatch.svg", io::render_svg(mplot, hash));

  auto arg = static_cast<std::size_t>(std::min_element(mismatch.begin(), mismatch.end()) - mismatch.begin());
  Outcome out;
  out.summary = {{"argmin_eta", etas[arg]}, {"min_mismatch", mismatch[arg]}};
  return out;
}

inline Outcome run_partner(const RunConfig& c, Artifacts& art) {
  const auto& s = c.partner;
  std::optional<Grid1D> grid;
  PotentialPair pair;
  EigenOptions opt;
  if (s.box) {
    grid = box_grid(s.box_n);
    pair = box_pair(*grid);
    opt = box_options();
    opt.richardson = s.richardson;
  } else {
    grid = c.grid1d();
    Units units = s.units == "unit_kinetic" ? Units::unit_kinetic : Units::oscillator;
    pair = partner_potentials(Superpotential(c.superpotential), *grid, units);
    opt = {kinetic_prefactor(units), false, s.richardson};
  }
  auto report = isospectral_report(pair, *grid, s.levels, s.tol, opt);

  io::Table lv;
  lv.add_meta("scenario", "partner");
  lv.add_meta("potential", report.potential_id);
  lv.add_meta("witten_index", std::to_string(report.susy.witten_index));
  lv.add_meta("unpaired_zero", report.unpaired_zero ? format_double(*report.unpaired_zero) : "none");
  lv.columns = {"n", "E1", "E2_paired", "delta"};
  const std::size_t w = static_cast<std::size_t>(report.susy.witten_index);
  for (std::size_t n = 0; n < s.levels; ++n)
    lv.add_row({static_cast<double>(n), report.e1[n], report.e2[n + w], report.delta[n]});
  art.table("partner_levels.dat", lv);

  io::Table pot;
  pot.add_meta("potential", report.potential_id);
  pot.columns = {"x", "V1", "V2"};
  const auto xs = grid->points();
  for (std::size_t i = 0; i < xs.size(); ++i) pot.add_row({xs[i], pair.v1[i], pair.v2[i]});
  auto hash = art.table("potentials.dat", pot);

  // Clip the plot a little above the highest computed level so the wells stay readable.
  double ceiling = std::max(report.e1.back(), report.e2.back());
  ceiling += 0.5 * std::abs(ceiling) + 1.0;
  auto clip = [&](const std::vector<double>& v) {
    std::vector<double> out(v);
    for (auto& e : out)
      if (!(e <= ceiling)) e = std::numeric_limits<double>::quiet_NaN();
    return out;
  };
  io::LineFamily plot{"Partner potentials " + report.potential_id, "x", "V", xs, {clip(pair.v1), clip(pair.v2)}, {}, {"V1", "V2"}};
  for (double e : report.e1) plot.references.emplace_back(xs.size(), e);
  art.put("potentials.svg", io::render_svg(plot, hash));

  Outcome out;
  out.summary = {{"max_delta", report.max_delta},
                 {"witten_index", report.susy.witten_index},
                 {"broken", report.susy.broken},
                 {"passed", report.passed}};
  if (report.unpaired_zero) out.summary["unpaired_zero"] = *report.unpaired_zero;
  if (!report.passed) out.flags.push_back("partner spectra do not pair within tol " + format_double(s.tol));
  return out;
}

inline Outcome run_propagate(const RunConfig& c, Artifacts& art) {
  auto p = protocol_config(c);
  const auto& s = c.propagate;
  auto psi = displace(fock_state(p.grid, 0), p.xbar);
  if (s.initial == "bdag_displaced_ground") psi = apply_B_dagger(detail::harmonic_w(), psi).psi;
  auto sched = barrier_schedule(p.grid, p.dt, s.eta, p.A, p.sigma, p.timing());

  io::Table carpet;
  carpet.add_meta("scenario", "propagate");
  carpet.add_meta("initial", s.initial);
  carpet.add_meta("eta", format_double(s.eta));
  carpet.columns = {"t_periods", "x", "density"};
  io::Heatmap map{"Density |psi(x,t)|^2", "x", "t (periods)", {}, {}, {}};
  for (std::size_t i = 0; i < p.grid.size(); i += s.x_stride) map.x.push_back(p.grid.x(i));

  PropagateOptions opt;
  opt.snapshot_every = s.snapshot_every;
  opt.energy_every = s.snapshot_every;
  opt.on_snapshot = [&](double t, const Wavefunction& w) {
    map.y.push_back(periods(t));
    std::vector<double> row;
    for (std::size_t i = 0; i < p.grid.size(); i += s.x_stride) {
      double d = std::norm(w[i]);
      row.push_back(d);
      carpet.add_row({periods(t), p.grid.x(i), d});
    }
    map.z.push_back(std::move(row));
  };
  auto rep = evolve_schedule(psi, sched, opt);
  auto hash = art.table("density.dat", carpet);
  art.put("density.svg", io::render_svg(map, hash));

  io::Table energy;
  energy.columns = {"t_periods", "energy"};
  for (auto [t, e] : rep.energy_trace) energy.add_row({periods(t), e});
  auto ehash = art.table("energy.dat", energy);
  io::LineFamily eplot{"Energy expectation", "t (periods)", "<H>", {}, {{}}, {}, {"<H>"}};
  for (auto [t, e] : rep.energy_trace) {
    eplot.x.push_back(periods(t));
    eplot.curves[0].push_back(e);
  }
  art.put("energy.svg", io::render_svg(eplot, ehash));

  std::ostringstream os;
  write_wavefunction(os, rep.final_state);
  art.put("psi_final.dat", os.str());

  Outcome out;
  out.summary = {{"norm_drift", rep.norm_drift}, {"steps", step_count(sched.duration(), p.dt)}};
  add_flags(out, rep.flags);
  return out;
}

inline Outcome run_shaking(const RunConfig& c, Artifacts& art) {
  auto p = protocol_config(c);
  Outcome out;
  const double st = c.protocol.pulse_pre.sigma_t_periods * two_pi;
  auto first = optimal_first_pulse(p.xbar);
  auto pulse = PulseSpec::from_product(first.dx_sigma_t, first.phi, st);
  auto coupling = transition_amplitude_C(pulse);
  const int n_max = static_cast<int>(c.shaking.n_max);
  auto sim = extract_Tmn(pulse, n_max, p.grid, p.dt, c.workers);
  auto ana = analytic_table(pulse, n_max);

  io::Table tt;
  tt.add_meta("scenario", "shaking-opt");
  tt.add_meta("pulse_dx_sigma_t_periods", format_double(periods(pulse.product())));
  tt.add_meta("pulse_phi_pi", format_double(pulse.phi / std::numbers::pi));
  tt.columns = {"m", "sim_re", "sim_im", "sim_prob", "analytic_re", "analytic_im", "analytic_prob"};
  io::LineFamily plot{"|T_m0|^2 at the closed-form first pulse", "m", "probability", {}, {{}}, {{}}, {"simulated"}};
  for (int m = 0; m <= n_max; ++m) {
    auto a = sim.T[static_cast<std::size_t>(m)][0], b = ana.T[static_cast<std::size_t>(m)][0];
    tt.add_row({static_cast<double>(m), a.real(), a.imag(), std::norm(a), b.real(), b.imag(), std::norm(b)});
    plot.x.push_back(m);
    plot.curves[0].push_back(std::norm(a));
    plot.references[0].push_back(std::norm(b));
  }
  auto hash = art.table("transitions.dat", tt);
  art.put("transitions.svg", io::render_svg(plot, hash));

  auto num_first = first_pulse_numeric(c, p);
  auto num_second = second_pulse_numeric(c, p);
  io::Table pt;
  pt.add_meta("rows", "0 closed-form first pulse, 1 numerical first pulse, 2 numerical second pulse");
  pt.add_meta("t_r_periods", format_double(c.protocol.t_r_periods));
  pt.columns = {"row", "dx_sigma_t_periods", "phi_pi", "fidelity", "epsilon"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  pt.add_row({0, periods(first.dx_sigma_t), first.phi / std::numbers::pi, nan, first.epsilon});
  pt.add_row({1, periods(num_first.pulse.product()), num_first.pulse.phi / std::numbers::pi, num_first.fidelity, nan});
  pt.add_row({2, periods(num_second.pulse.product()), num_second.pulse.phi / std::numbers::pi, num_second.fidelity, nan});
  art.table("pulses.dat", pt);

  out.summary = {
      {"first_pulse_closed_form", {{"dx_sigma_t_periods", periods(first.dx_sigma_t)}, {"phi_pi", first.phi / std::numbers::pi}, {"epsilon", first.epsilon}}},
      {"first_pulse_numeric", {{"dx_sigma_t_periods", periods(num_first.pulse.product())}, {"phi_pi", num_first.pulse.phi / std::numbers::pi}, {"fidelity", num_first.fidelity}}},
      {"second_pulse_numeric", {{"dx_sigma_t_periods", periods(num_second.pulse.product())}, {"phi_pi", num_second.pulse.phi / std::numbers::pi}, {"fidelity", num_second.fidelity}}},
      {"T00_prob", std::norm(sim.T[0][0])},
      {"C_relative_difference", coupling.relative_difference}};
  if (n_max >= 1) out.summary["T10_prob"] = std::norm(sim.T[1][0]);
  for (int col : sim.flagged_columns) out.flags.push_back("transition column " + std::to_string(col) + " leaks out of the table");
  for (const auto& n : num_second.notes) out.summary["notes"].push_back(n);
  return out;
}

inline Outcome run_interfere(const RunConfig& c, Artifacts& art) {
  auto p = protocol_config(c);
  Outcome out;
  resolve_pulses(c, p, out);
  auto r = run_protocol(p);
  const auto& s = c.interfere;
  auto pat = interference_pattern(r.psi_f, r.psi_eta, s.fringe_k, s.y_min, s.y_max, s.samples);
  io::Table t;
  t.add_meta("scenario", "interfere");
  t.add_meta("mode", to_string(p.mode));
  t.add_meta("eta", format_double(p.eta));
  t.add_meta("contrast", format_double(r.contrast));
  t.columns = {"y", "intensity"};
  for (std::size_t i = 0; i < pat.y.size(); ++i) t.add_row({pat.y[i], pat.intensity[i]});
  auto hash = art.table("pattern.dat", t);
  io::LineFamily plot{"Output-port intensity", "y", "I(y)", pat.y, {pat.intensity}, {}, {"I"}};
  art.put("pattern.svg", io::render_svg(plot, hash));
  std::ostringstream f, e;
  write_wavefunction(f, r.psi_f);
  write_wavefunction(e, r.psi_eta);
  art.put("psi_f.dat", f.str());
  art.put("psi_eta.dat", e.str());
  out.summary["contrast"] = r.contrast;
  out.summary["fringe_contrast"] = pat.fringe_contrast;
  add_flags(out, r.flags);
  return out;
}

inline Outcome run_sweep(const RunConfig& c, Artifacts& art) {
  auto p = protocol_config(c);
  Outcome out;
  resolve_pulses(c, p, out);
  const auto& s = c.sweep;
  std::vector<double> t_r;
  for (double v : range(s.t_r_min_periods, s.t_r_max_periods, s.t_r_step_periods)) t_r.push_back(v * two_pi);
  auto etas = range(s.eta_min, s.eta_max, s.eta_step);
  auto map = contrast_map(p, t_r, etas, c.workers);

  io::Table t;
  t.add_meta("scenario", "sweep");
  t.add_meta("mode", to_string(p.mode));
  t.add_meta("xbar", format_double(p.xbar));
  t.columns = {"t_r_periods", "eta", "contrast"};
  io::Heatmap hm{"Contrast", "eta", "t_r (periods)", etas, {}, map.contrast};
  for (std::size_t i = 0; i < t_r.size(); ++i) {
    hm.y.push_back(periods(t_r[i]));
    for (std::size_t j = 0; j < etas.size(); ++j) t.add_row({periods(t_r[i]), etas[j], map.contrast[i][j]});
  }
  auto hash = art.table("contrast_map.dat", t);
  art.put("contrast_map.svg", io::render_svg(hm, hash));

  io::Table avg;
  avg.columns = {"eta", "averaged_contrast"};
  for (std::size_t j = 0; j < etas.size(); ++j) avg.add_row({etas[j], map.averaged[j]});
  auto ahash = art.table("averaged.dat", avg);
  io::LineFamily plot{"t_r-averaged contrast", "eta", "contrast", etas, {map.averaged}, {}, {"averaged"}};
  art.put("averaged.svg", io::render_svg(plot, ahash));

  auto arg = static_cast<std::size_t>(std::max_element(map.averaged.begin(), map.averaged.end()) - map.averaged.begin());
  out.summary["argmax_eta"] = etas[arg];
  out.summary["max_averaged"] = map.averaged[arg];
  add_flags(out, map.failures);
  return out;
}

inline Outcome run_gauge2d(const RunConfig& c, Artifacts& art) {
  const auto& s = c.gauge2d;
  Grid2D grid(s.L, s.n);
  GaugeConfig gc{s.B, s.g, 0.0, {}};
  auto res = supercharge_residuals(grid, gc, s.samples, c.seed);
  auto spec = landau_spectrum(grid, gc, s.levels, c.workers);
  auto etas = range(s.eta_min, s.eta_max, s.eta_step);
  auto sweep = eta_detune_sweep(grid, gc, etas, s.levels, c.workers);

  io::Table rt;
  rt.add_meta("scenario", "gauge2d");
  rt.add_meta("seed", std::to_string(c.seed));
  rt.columns = {"r_comm", "r_anti", "r_cross"};
  rt.add_row({res.r_comm, res.r_anti, res.r_cross});
  art.table("residuals.dat", rt);

  io::Table lt;
  lt.add_meta("B", format_double(s.B));
  lt.add_meta("g", format_double(s.g));
  lt.columns = {"level", "orbital", "E_up", "E_down", "multiplicity"};
  for (std::size_t k = 0; k < spec.orbital.size(); ++k)
    lt.add_row({static_cast<double>(k), spec.orbital[k].energy, spec.up[k].energy, spec.down[k].energy,
                static_cast<double>(spec.orbital[k].multiplicity)});
  art.table("landau.dat", lt);

  io::Table pt;
  pt.columns = {"eta", "mismatch", "unshifted"};
  io::LineFamily plot{"Spin-sector pairing", "eta", "mismatch", etas, {{}}, {{}}, {"shifted pairing"}};
  for (const auto& q : sweep) {
    pt.add_row({q.eta, q.mismatch, q.unshifted});
    plot.curves[0].push_back(q.mismatch);
    plot.references[0].push_back(q.unshifted);
  }
  auto hash = art.table("pairing.dat", pt);
  art.put("pairing.svg", io::render_svg(plot, hash));

  Outcome out;
  out.summary = {{"r_comm", res.r_comm}, {"r_anti", res.r_anti}, {"r_cross", res.r_cross}};
  if (!spec.up.empty()) out.summary["lowest_up"] = spec.up.front().energy;
  if (spec.orbital.size() >= 2) out.summary["spacing"] = spec.orbital[1].energy - spec.orbital[0].energy;
  auto arg = static_cast<std::size_t>(
      std::min_element(sweep.begin(), sweep.end(), [](auto& a, auto& b) { return a.mismatch < b.mismatch; }) -
      sweep.begin());
  out.summary["argmin_eta"] = sweep[arg].eta;
  if (spec.boundary_flag) add_flags(out, spec.notes);
  return out;
}

inline nlohmann::json versions() {
  lapack_int maj = 0, min = 0, patch = 0;
  LAPACKE_ilaver(&maj, &min, &patch);
  nlohmann::json v;
  v["susyq"] = version;
  v["fftw"] = std::string(fftw_version);
  v["lapack"] = std::to_string(maj) + "." + std::to_string(min) + "." + std::to_string(patch);
  v["openssl"] = std::string(OpenSSL_version(OPENSSL_VERSION));
  v["compiler"] = std::string(__VERSION__);
  return v;
}

inline std::pair<int, std::string> classify(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return {exit_config, "config"};
  if (dynamic_cast<const IoError*>(&e)) return {exit_io, "io"};
  return {exit_numerical, "numerical"};
}

inline nlohmann::json error_record(int code, const std::string& kind, const std::string& message,
                                   const std::vector<std::string>& details) {
  return {{"exit_code", code}, {"kind", kind}, {"message", message}, {"details", details}};
}

}  // namespace cli

/// Runs one scenario into `out_dir`: data tables, SVGs, manifest.json, and error.json when
/// anything is flagged. Returns the process exit code.
inline int execute(const RunConfig& cfg, const std::filesystem::path& out_dir, const std::string& input_text,
                   std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  std::optional<cli::Artifacts> art;
  try {
    art.emplace(out_dir);
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return exit_io;
  }
  cli::Outcome outcome;
  int code = exit_ok;
  std::string kind, message;
  try {
    if (cfg.scenario == "spectrum") outcome = cli::run_spectrum(cfg, *art);
    else if (cfg.scenario == "partner") outcome = cli::run_partner(cfg, *art);
    else if (cfg.scenario == "propagate") outcome = cli::run_propagate(cfg, *art);
    else if (cfg.scenario == "shaking-opt") outcome = cli::run_shaking(cfg, *art);
    else if (cfg.scenario == "interfere") outcome = cli::run_interfere(cfg, *art);
    else if (cfg.scenario == "sweep") outcome = cli::run_sweep(cfg, *art);
    else if (cfg.scenario == "gauge2d") outcome = cli::run_gauge2d(cfg, *art);
    else throw ConfigError("scenario: unknown '" + cfg.scenario + "'");
    if (!outcome.flags.empty()) {
      code = exit_numerical;
      kind = "numerical";
      message = "run completed with flagged results";
    }
  } catch (const std::exception& e) {
    std::tie(code, kind) = cli::classify(e);
    message = e.what();
  }

  try {
    if (code != exit_ok)
      art->put("error.json", cli::error_record(code, kind, message, outcome.flags).dump(2) + "\n");
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    nlohmann::json manifest = {{"schema", schema_id},
                               {"scenario", cfg.scenario},
                               {"status", code == exit_ok ? "ok" : kind},
                               {"exit_code", code},
                               {"input_sha256", io::sha256_hex(input_text)},
                               {"config_sha256", io::sha256_hex(emit_config(cfg))},
                               {"seed", cfg.seed},
                               {"workers", cfg.workers},
                               {"versions", cli::versions()},
                               {"wall_time_s", wall},
                               {"files", art->files()},
                               {"summary", outcome.summary},
                               {"flags", outcome.flags}};
    io::write_file(art->dir() / "manifest.json", manifest.dump(2) + "\n");
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return exit_io;
  }
  if (code != exit_ok) log << "error (" << kind << "): " << message << "\n";
  for (const auto& f : outcome.flags) log << "flag: " << f << "\n";
  log << cfg.scenario << ": " << outcome.summary.dump() << "\n";
  return code;
}

}  // namespace susyq
