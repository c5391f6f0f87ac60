#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "propagate.hpp"
#include "shaking.hpp"
#include "susy.hpp"

namespace susyq {

enum class OperatorMode { exact_Bdag, exact_x, shaking };

inline std::string to_string(OperatorMode m) {
  switch (m) {
    case OperatorMode::exact_Bdag: return "exact_Bdag";
    case OperatorMode::exact_x: return "exact_x";
    case OperatorMode::shaking: return "shaking";
  }
  return "?";
}

/// Two-arm protocol. Arm 1: χ0 → displace → V_0 schedule → operator. Arm 2: χ0 → (first pulse)
/// → displace → operator → V_η schedule. In the exact modes the operator acts on the displaced
/// state; in shaking mode it is the pulse pair (pre on arm 2, post on arm 1).
struct ProtocolConfig {
  Grid1D grid = Grid1D::production();
  double dt = default_dt;
  double xbar = -5.0;
  double A = std::sqrt(26.0);
  double sigma = 0.5;
  double t_r = 0.0;
  double ramp_up = 3.0 * two_pi;
  double ramp_down = 3.0 * two_pi;
  double eta = 1.0;
  OperatorMode mode = OperatorMode::exact_Bdag;
  std::optional<PulseSpec> pulse_pre;
  std::optional<PulseSpec> pulse_post;

  void validate() const {
    if (!(sigma > 0)) throw ConfigError("protocol: sigma must be positive");
    if (ramp_up < 0 || ramp_down < 0 || t_r < 0) throw ConfigError("protocol: times must be non-negative");
    if (mode == OperatorMode::shaking && (!pulse_pre || !pulse_post))
      throw ConfigError("protocol: shaking mode needs both pulse_pre and pulse_post");
  }

  BarrierTiming timing() const { return {ramp_up, t_r, ramp_down}; }
};

/// 2|⟨f|η⟩| / (⟨f|f⟩ + ⟨η|η⟩).
inline double contrast(const Wavefunction& f, const Wavefunction& e) {
  double denom = f.norm_squared() + e.norm_squared();
  if (denom == 0.0) throw NumericalError("contrast: both states are zero");
  return 2.0 * std::abs(inner_product(f, e)) / denom;
}

struct ProtocolResult {
  Wavefunction psi_f;
  Wavefunction psi_eta;
  double contrast = 0.0;
  bool flagged = false;
  std::vector<std::string> flags;
};

namespace detail {

inline const Superpotential& harmonic_w() {
  static const Superpotential w{Monomial{1.0, 1}};
  return w;
}

inline Wavefunction apply_exact_operator(OperatorMode mode, const Wavefunction& psi) {
  if (mode == OperatorMode::exact_x) return psi.multiplied(psi.grid().points());
  return apply_B_dagger(harmonic_w(), psi).psi;
}

inline void merge(ProtocolResult& r, const PropagationReport& rep, const std::string& arm) {
  for (const auto& f : rep.flags) r.flags.push_back(arm + ": " + f);
  r.flagged = r.flagged || rep.flagged;
}

inline Wavefunction run_pulse(const Wavefunction& psi, const PulseSpec& p, double dt, PropagationReport* rep = nullptr) {
  Schedule s{psi.grid(), dt, {pulse_segment(psi.grid(), p, dt)}};
  auto r = evolve_schedule(psi, s);
  if (rep) *rep = r;
  return r.final_state;
}

/// Arm 2 state right before the barrier schedule starts.
inline Wavefunction arm2_initial(const ProtocolConfig& cfg) {
  auto psi = fock_state(cfg.grid, 0);
  if (cfg.mode == OperatorMode::shaking) {
    psi = run_pulse(psi, *cfg.pulse_pre, cfg.dt);
    return displace(psi, cfg.xbar);
  }
  return apply_exact_operator(cfg.mode, displace(psi, cfg.xbar));
}

inline Wavefunction arm1_finish(const ProtocolConfig& cfg, const Wavefunction& psi) {
  if (cfg.mode == OperatorMode::shaking) return run_pulse(psi, *cfg.pulse_post, cfg.dt);
  return apply_exact_operator(cfg.mode, psi);
}

}  // namespace detail

inline ProtocolResult run_protocol(const ProtocolConfig& cfg) {
  cfg.validate();
  auto arm1 = evolve_schedule(displace(fock_state(cfg.grid, 0), cfg.xbar),
                              barrier_schedule(cfg.grid, cfg.dt, 0.0, cfg.A, cfg.sigma, cfg.timing()));
  auto arm2 = evolve_schedule(detail::arm2_initial(cfg),
                              barrier_schedule(cfg.grid, cfg.dt, cfg.eta, cfg.A, cfg.sigma, cfg.timing()));
  ProtocolResult r{detail::arm1_finish(cfg, arm1.final_state), arm2.final_state, 0.0, false, {}};
  detail::merge(r, arm1, "arm1");
  detail::merge(r, arm2, "arm2");
  r.contrast = contrast(r.psi_f, r.psi_eta);
  return r;
}

struct ContrastMap {
  std::vector<double> t_r;
  std::vector<double> eta;
  /// contrast[i][j] at (t_r[i], eta[j]); NaN marks a failed cell.
  std::vector<std::vector<double>> contrast;
  /// Mean over t_r for each η.
  std::vector<double> averaged;
  std::vector<std::string> failures;
};

namespace detail {

/// Runs ramp-up, then the hold with a checkpoint at every t_r, then ramp-down from each
/// checkpoint. Step-for-step identical to separate barrier_schedule runs.
inline std::vector<Wavefunction> evolve_checkpoints(const Wavefunction& psi0, const ProtocolConfig& cfg, double eta,
                                                    const std::vector<std::size_t>& hold_steps) {
  const auto& g = cfg.grid;
  auto up = step_count(cfg.ramp_up, cfg.dt), down = step_count(cfg.ramp_down, cfg.dt);
  double tu = cfg.ramp_up, td = cfg.ramp_down;
  Propagator prop(g, cfg.dt);
  Wavefunction psi = psi0;
  if (up) prop.run(psi.amplitudes(), barrier_segment("ramp_up", g, eta, cfg.A, cfg.sigma, [tu](double t) { return t / tu; }, up));
  auto hold = barrier_segment("hold", g, eta, cfg.A, cfg.sigma, nullptr, 0);
  auto down_seg = barrier_segment("ramp_down", g, eta, cfg.A, cfg.sigma, [td](double t) { return 1.0 - t / td; }, down);
  auto table = build_phase_table(prop.stepper(), down_seg);
  std::vector<Wavefunction> out;
  std::size_t done = 0;
  for (auto target : hold_steps) {
    hold.steps = target - done;
    if (hold.steps) prop.run(psi.amplitudes(), hold);
    done = target;
    Wavefunction w = psi;
    prop.run(w.amplitudes(), table);
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace detail

/// Contrast over a (t_r, η) lattice. η columns run as independent jobs; arm 1 does not depend on η
/// and is computed once.
inline ContrastMap contrast_map(const ProtocolConfig& base, std::vector<double> t_r, std::vector<double> eta,
                                std::size_t workers = 1) {
  base.validate();
  if (t_r.empty() || eta.empty()) throw ConfigError("contrast_map: ranges must be nonempty");
  if (!std::is_sorted(t_r.begin(), t_r.end())) throw ConfigError("contrast_map: t_r must be ascending");
  std::vector<std::size_t> hold_steps;
  for (double t : t_r) hold_steps.push_back(step_count(t, base.dt));

  ContrastMap map{t_r, eta, std::vector<std::vector<double>>(t_r.size(), std::vector<double>(eta.size())), {}, {}};

  auto arm1 = detail::evolve_checkpoints(displace(fock_state(base.grid, 0), base.xbar), base, 0.0, hold_steps);
  std::vector<Wavefunction> finals(arm1.size(), Wavefunction(base.grid));
  parallel_for(arm1.size(), workers, [&](std::size_t i) { finals[i] = detail::arm1_finish(base, arm1[i]); });
  arm1.clear();
  const auto start = detail::arm2_initial(base);

  std::vector<std::string> errors(eta.size());
  parallel_for(eta.size(), workers, [&](std::size_t j) {
    try {
      auto states = detail::evolve_checkpoints(start, base, eta[j], hold_steps);
      for (std::size_t i = 0; i < states.size(); ++i) map.contrast[i][j] = contrast(finals[i], states[i]);
    } catch (const Error& e) {
      errors[j] = "eta=" + format_double(eta[j]) + ": " + e.what();
      for (auto& row : map.contrast) row[j] = std::numeric_limits<double>::quiet_NaN();
    }
  });
  for (auto& e : errors)
    if (!e.empty()) map.failures.push_back(std::move(e));

  map.averaged.assign(eta.size(), 0.0);
  for (std::size_t j = 0; j < eta.size(); ++j) {
    for (std::size_t i = 0; i < t_r.size(); ++i) map.averaged[j] += map.contrast[i][j];
    map.averaged[j] /= static_cast<double>(t_r.size());
  }
  return map;
}

/// Evenly spaced values lo, lo+step, ..., up to hi (inclusive within rounding).
inline std::vector<double> linspace_step(double lo, double hi, double step) {
  if (!(step > 0) || hi < lo) throw ConfigError("range: need step > 0 and hi >= lo");
  auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> v(n);
  // Snap to 1e-12 so that e.g. 0.05-steps print as 0.95 rather than 0.9500000000000002.
  for (std::size_t i = 0; i < n; ++i) v[i] = std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12;
  return v;
}

struct InterferencePattern {
  std::vector<double> y;
  std::vector<double> intensity;
  /// (max − min)/(max + min) of the samples.
  double fringe_contrast = 0.0;
};

/// I(y) = ⟨f|f⟩ + ⟨η|η⟩ + 2|⟨f|η⟩| cos(k y + arg⟨f|η⟩).
inline InterferencePattern interference_pattern(const Wavefunction& f, const Wavefunction& e, double fringe_k,
                                                double y_min, double y_max, std::size_t samples = 20001) {
  if (!(fringe_k > 0)) throw ConfigError("interference_pattern: fringe_k must be positive");
  if (samples < 2 || !(y_max > y_min)) throw ConfigError("interference_pattern: need a nonempty y range");
  cplx overlap = inner_product(f, e);
  double base = f.norm_squared() + e.norm_squared();
  InterferencePattern p;
  for (std::size_t i = 0; i < samples; ++i) {
    double y = y_min + (y_max - y_min) * static_cast<double>(i) / static_cast<double>(samples - 1);
    p.y.push_back(y);
    p.intensity.push_back(base + 2.0 * std::abs(overlap) * std::cos(fringe_k * y + std::arg(overlap)));
  }
  auto [lo, hi] = std::minmax_element(p.intensity.begin(), p.intensity.end());
  p.fringe_contrast = (*hi - *lo) / (*hi + *lo);
  return p;
}

}  // namespace susyq
