#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "fft.hpp"
#include "grid.hpp"
#include "spectrum.hpp"
#include "susy.hpp"

namespace susyq {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Default time step, 2π/1024.
inline constexpr double default_dt = two_pi / 1024.0;

/// Potential V(x, t) = base(x) + Σ_j a_j(t)·shape_j(x) on a run of `steps` equal time steps.
/// Time is local to the segment; steps sample it at midpoints (s + 1/2)·dt.
struct Segment {
  struct Term {
    /// `linear`: shape is the grid coordinate x; `constant`: shape is 1 everywhere. Both let the
    /// stepper build phases without per-point exponentials.
    enum class Form { general, linear, constant };
    std::function<double(double)> amplitude;
    std::vector<double> shape;
    Form form = Form::general;
  };

  std::string label;
  std::size_t steps = 0;
  std::vector<double> base;
  std::vector<Term> terms;

  bool is_static() const { return terms.empty(); }

  void potential_at(double t, std::span<double> out) const {
    std::copy(base.begin(), base.end(), out.begin());
    for (const auto& term : terms) {
      double a = term.amplitude(t);
      if (a == 0.0) continue;
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * term.shape[i];
    }
  }
};

struct Schedule {
  Grid1D grid;
  double dt = default_dt;
  std::vector<Segment> segments;

  double duration() const {
    std::size_t s = 0;
    for (const auto& seg : segments) s += seg.steps;
    return static_cast<double>(s) * dt;
  }
};

/// Number of dt steps in a duration; the duration must be a whole multiple of dt.
inline std::size_t step_count(double duration, double dt) {
  if (duration < 0) throw ConfigError("durations must be non-negative");
  double r = duration / dt;
  double n = std::round(r);
  if (std::abs(r - n) > 1e-6 * std::max(1.0, n))
    throw ConfigError("duration " + format_double(duration) + " is not a whole number of time steps");
  return static_cast<std::size_t>(n);
}

inline std::vector<double> sample_on(const Grid1D& g, const std::function<double(double)>& f) {
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(g.x(i));
  return out;
}

inline Segment static_segment(std::string label, std::vector<double> v, std::size_t steps) {
  return {std::move(label), steps, std::move(v), {}};
}

/// V_η with the barrier amplitude scaled by envelope a(t): the p-term goes with a, the s-term with a².
inline Segment barrier_segment(std::string label, const Grid1D& g, double eta, double A, double sigma,
                               std::function<double(double)> envelope, std::size_t steps) {
  const double s2 = 4.0 * sigma * sigma;
  Segment seg{std::move(label), steps, sample_on(g, [](double x) { return 0.5 * x * x; }), {}};
  auto s_shape = sample_on(g, [&](double x) { return 0.5 * A * A * std::exp(-2.0 * x * x / s2); });
  auto p_shape = sample_on(g, [&](double x) { return A * x * std::exp(-x * x / s2) * (1.0 + (2.0 * eta - 1.0) / s2); });
  if (!envelope) {
    for (std::size_t i = 0; i < seg.base.size(); ++i) seg.base[i] += s_shape[i] + p_shape[i];
    return seg;
  }
  seg.terms.push_back({[envelope](double t) { double a = envelope(t); return a * a; }, std::move(s_shape)});
  seg.terms.push_back({envelope, std::move(p_shape)});
  return seg;
}

/// Strang splitting exp(−iV dt/2) exp(−iκ p² dt) exp(−iV dt/2) with FFTW transforms.
class SplitStepper {
 public:
  SplitStepper(const Grid1D& g, double dt, double kinetic = 0.5) : grid_(g), dt_(dt), plan_(g.size()), kin_(g.size()) {
    auto k = g.wavenumbers();
    double inv_n = 1.0 / static_cast<double>(g.size());
    for (std::size_t j = 0; j < k.size(); ++j) kin_[j] = std::polar(inv_n, -kinetic * k[j] * k[j] * dt);
  }

  double dt() const { return dt_; }
  const Grid1D& grid() const { return grid_; }

  /// exp(−i V dt/2) for one half step.
  void half_phase(std::span<const double> v, std::span<cplx> out) const {
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::polar(1.0, -0.5 * dt_ * v[i]);
  }

  /// Half-step phases of a segment at step s; `base` must hold half_phase(seg.base).
  void segment_phase(const Segment& seg, std::size_t s, std::span<const cplx> base, std::span<cplx> out,
                     std::span<double> scratch) const {
    using Form = Segment::Term::Form;
    const double t = (static_cast<double>(s) + 0.5) * dt_;
    std::copy(base.begin(), base.end(), out.begin());
    bool general = false;
    std::fill(scratch.begin(), scratch.end(), 0.0);
    for (const auto& term : seg.terms) {
      double a = term.amplitude(t);
      if (a == 0.0) continue;
      if (term.form == Form::general) {
        general = true;
        for (std::size_t i = 0; i < out.size(); ++i) scratch[i] += a * term.shape[i];
      } else if (term.form == Form::constant) {
        cplx c = std::polar(1.0, -0.5 * dt_ * a);
        for (auto& o : out) o = mul(o, c);
      } else {
        // exp(−iθ x_j) = exp(−iθ x_0)·r^j with r = exp(−iθ dx).
        const double theta = 0.5 * dt_ * a;
        cplx z = std::polar(1.0, -theta * grid_.x_min());
        const cplx r = std::polar(1.0, -theta * grid_.dx());
        for (auto& o : out) {
          o = mul(o, z);
          z = mul(z, r);
        }
      }
    }
    if (general)
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = mul(out[i], std::polar(1.0, -0.5 * dt_ * scratch[i]));
  }

  void step(std::span<cplx> psi, std::span<const cplx> half) {
    auto buf = plan_.buffer();
    for (std::size_t i = 0; i < psi.size(); ++i) buf[i] = mul(psi[i], half[i]);
    plan_.forward();
    for (std::size_t j = 0; j < buf.size(); ++j) buf[j] = mul(buf[j], kin_[j]);
    plan_.backward();
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = mul(buf[i], half[i]);
  }

 private:
  // Plain product; operator* on std::complex carries inf/nan recovery that blocks vectorization.
  static cplx mul(cplx a, cplx b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
  }

  Grid1D grid_;
  double dt_;
  detail::FftPlan plan_;
  std::vector<cplx> kin_;
};

/// Half-step phases for every step of a segment, for reuse across many runs of the same segment.
struct PhaseTable {
  std::size_t steps = 0;
  bool is_static = true;
  std::vector<std::vector<cplx>> phases;  // one entry if static, else one per step
};

inline PhaseTable build_phase_table(const SplitStepper& stepper, const Segment& seg) {
  const auto n = stepper.grid().size();
  PhaseTable t{seg.steps, seg.is_static(), {}};
  std::vector<cplx> base(n);
  std::vector<double> scratch(n);
  stepper.half_phase(seg.base, base);
  if (seg.is_static()) {
    t.phases.push_back(std::move(base));
    return t;
  }
  t.phases.assign(seg.steps, std::vector<cplx>(n));
  for (std::size_t s = 0; s < seg.steps; ++s) stepper.segment_phase(seg, s, base, t.phases[s], scratch);
  return t;
}

struct PropagateOptions {
  double kinetic = 0.5;
  /// Call on_snapshot every this many steps (and at t = 0); 0 disables snapshots.
  std::size_t snapshot_every = 0;
  std::function<void(double, const Wavefunction&)> on_snapshot;
  /// Record ⟨H(t)⟩ every this many steps; 0 disables the trace.
  std::size_t energy_every = 0;
  double norm_drift_limit = 1e-6;
};

struct PropagationReport {
  Wavefunction final_state;
  double norm_drift = 0.0;
  /// (t, ⟨H(t)⟩) samples.
  std::vector<std::pair<double, double>> energy_trace;
  bool flagged = false;
  std::vector<std::string> flags;
};

/// Steps a schedule. One SplitStepper per call keeps concurrent calls independent.
class Propagator {
 public:
  Propagator(const Grid1D& g, double dt, PropagateOptions opt = {})
      : opt_(std::move(opt)), stepper_(g, dt, opt_.kinetic), v_(g.size()), base_(g.size()), half_(g.size()) {
    if (!(dt > 0) || dt > two_pi / 64.0 * (1.0 + 1e-12)) throw ConfigError("dt must lie in (0, 2π/64]");
  }

  SplitStepper& stepper() { return stepper_; }

  /// Advances psi in place through one segment; `t0` is only used for snapshot/trace times.
  void run(std::span<cplx> psi, const Segment& seg, double t0 = 0.0) {
    stepper_.half_phase(seg.base, base_);
    if (seg.is_static()) std::copy(base_.begin(), base_.end(), half_.begin());
    for (std::size_t s = 0; s < seg.steps; ++s) {
      if (!seg.is_static()) stepper_.segment_phase(seg, s, base_, half_, v_);
      observe(psi, seg, t0, s);
      stepper_.step(psi, half_);
    }
    observe(psi, seg, t0, seg.steps);
  }

  /// Same as run() with precomputed phases; results are bitwise identical.
  void run(std::span<cplx> psi, const PhaseTable& table) {
    for (std::size_t s = 0; s < table.steps; ++s) stepper_.step(psi, table.phases[table.is_static ? 0 : s]);
  }

  PropagationReport evolve(const Wavefunction& psi0, const Schedule& sched) {
    Wavefunction psi = psi0;
    double t = 0.0;
    trace_.clear();
    last_ = SIZE_MAX;
    for (const auto& seg : sched.segments) {
      run(psi.amplitudes(), seg, t);
      t += static_cast<double>(seg.steps) * stepper_.dt();
    }
    return finish(psi0, std::move(psi));
  }

  PropagationReport finish(const Wavefunction& psi0, Wavefunction psi) {
    PropagationReport r{std::move(psi), 0.0, std::move(trace_), false, {}};
    double n0 = psi0.norm_squared();
    r.norm_drift = std::abs(r.final_state.norm_squared() - n0) / n0;
    if (r.norm_drift > opt_.norm_drift_limit) {
      r.flagged = true;
      r.flags.push_back("norm drift " + format_double(r.norm_drift));
    }
    if (!boundary_decayed(r.final_state, 1e-6)) {
      r.flagged = true;
      r.flags.push_back("state reaches the box edge");
    }
    trace_.clear();
    return r;
  }

 private:
  void observe(std::span<cplx> psi, const Segment& seg, double t0, std::size_t s) {
    bool snap = opt_.snapshot_every && opt_.on_snapshot && s % opt_.snapshot_every == 0;
    bool energy = opt_.energy_every && s % opt_.energy_every == 0;
    if (!snap && !energy) return;
    double t = t0 + static_cast<double>(s) * stepper_.dt();
    // Segment boundaries are visited twice (end of one, start of next); keep the first.
    auto key = static_cast<std::size_t>(std::llround(t / stepper_.dt()));
    if (key == last_) return;
    last_ = key;
    Wavefunction w(stepper_.grid(), std::vector<cplx>(psi.begin(), psi.end()));
    if (snap) opt_.on_snapshot(t, w);
    if (energy) {
      std::vector<double> v(w.size());
      seg.potential_at(std::min(static_cast<double>(s), static_cast<double>(seg.steps)) * stepper_.dt(), v);
      trace_.emplace_back(t, energy_expectation(w, v, opt_.kinetic));
    }
  }

  PropagateOptions opt_;
  SplitStepper stepper_;
  std::vector<double> v_;
  std::vector<cplx> base_;
  std::vector<cplx> half_;
  std::vector<std::pair<double, double>> trace_;
  std::size_t last_ = SIZE_MAX;
};

/// `steps` steps of dt under a static potential.
inline PropagationReport split_step(const Wavefunction& psi, std::span<const double> v, double dt, std::size_t steps,
                                    const PropagateOptions& opt = {}) {
  Schedule s{psi.grid(), dt, {static_segment("static", {v.begin(), v.end()}, steps)}};
  return Propagator(psi.grid(), dt, opt).evolve(psi, s);
}

inline PropagationReport evolve_schedule(const Wavefunction& psi, const Schedule& sched,
                                         const PropagateOptions& opt = {}) {
  psi.require_same_grid(Wavefunction(sched.grid));
  return Propagator(sched.grid, sched.dt, opt).evolve(psi, sched);
}

/// |⟨a,b⟩|² / (‖a‖²‖b‖²).
inline double fidelity(const Wavefunction& a, const Wavefunction& b) {
  return std::norm(inner_product(a, b)) / (a.norm_squared() * b.norm_squared());
}

struct BarrierTiming {
  double ramp_up = 3.0 * two_pi;
  double hold = 0.0;
  double ramp_down = 3.0 * two_pi;
};

/// Linear ramp up, hold at full amplitude, linear ramp down; A = 0 outside.
inline Schedule barrier_schedule(const Grid1D& g, double dt, double eta, double A, double sigma,
                                 const BarrierTiming& timing) {
  Schedule s{g, dt, {}};
  auto up = step_count(timing.ramp_up, dt);
  auto hold = step_count(timing.hold, dt);
  auto down = step_count(timing.ramp_down, dt);
  double tu = timing.ramp_up, td = timing.ramp_down;
  if (up) s.segments.push_back(barrier_segment("ramp_up", g, eta, A, sigma, [tu](double t) { return t / tu; }, up));
  if (hold) s.segments.push_back(barrier_segment("hold", g, eta, A, sigma, nullptr, hold));
  if (down)
    s.segments.push_back(barrier_segment("ramp_down", g, eta, A, sigma, [td](double t) { return 1.0 - t / td; }, down));
  return s;
}

/// ‖B†U1(t)ψ − U2(t)B†ψ‖ / ‖B†ψ‖ with static partner potentials. `v2_override` replaces V2
/// (negative controls).
inline double intertwining_residual(const Superpotential& w, const Wavefunction& psi, double t, double dt = default_dt,
                                    const std::optional<std::vector<double>>& v2_override = std::nullopt) {
  const auto& g = psi.grid();
  auto pair = partner_potentials(w, g);
  const auto& v2 = v2_override ? *v2_override : pair.v2;
  auto steps = step_count(t, dt);
  auto lhs = apply_B_dagger(w, split_step(psi, pair.v1, dt, steps).final_state).psi;
  auto bpsi = apply_B_dagger(w, psi).psi;
  auto rhs = split_step(bpsi, v2, dt, steps).final_state;
  return (lhs - rhs).norm() / bpsi.norm();
}

}  // namespace susyq
