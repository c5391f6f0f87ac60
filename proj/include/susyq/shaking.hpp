#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "error.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "propagate.hpp"
#include "susy.hpp"

namespace susyq {

/// Trap-center drive x(t) = δx sin(Ωt + φ) exp(−(t − t0)²/(2σt²)), t measured from the start of
/// the pulse segment. The trap during the pulse is V = (x + x(t))²/2 with no barriers.
struct PulseSpec {
  double dx = 0.0;
  double omega = 1.0;
  double phi = 0.0;
  double sigma_t = 2.0 * two_pi;
  double t0 = 10.0 * two_pi;

  static PulseSpec from_product(double dx_sigma_t, double phi, double sigma_t = 2.0 * two_pi, double omega = 1.0) {
    return {dx_sigma_t / sigma_t, omega, phi, sigma_t, 5.0 * sigma_t};
  }

  double product() const { return dx * sigma_t; }
  /// Length of the dedicated schedule segment, 10σt.
  double duration() const { return 10.0 * sigma_t; }

  double displacement(double t) const {
    double u = (t - t0) / sigma_t;
    return dx * std::sin(omega * t + phi) * std::exp(-0.5 * u * u);
  }

  void validate() const {
    if (!(omega > 0)) throw ConfigError("pulse: omega must be positive");
    if (!(sigma_t > 0)) throw ConfigError("pulse: sigma_t must be positive");
    if (t0 - 5.0 * sigma_t < -1e-9 * sigma_t || t0 + 5.0 * sigma_t > duration() * (1.0 + 1e-12))
      throw ConfigError("pulse: window t0 ± 5 sigma_t must lie inside its segment");
  }

  friend bool operator==(const PulseSpec&, const PulseSpec&) = default;
};

inline Segment pulse_segment(const Grid1D& g, const PulseSpec& p, double dt) {
  p.validate();
  Segment seg{"pulse", step_count(p.duration(), dt), sample_on(g, [](double x) { return 0.5 * x * x; }), {}};
  if (p.dx == 0.0) return seg;
  seg.terms.push_back({[p](double t) { return p.displacement(t); }, g.points(), Segment::Term::Form::linear});
  seg.terms.push_back({[p](double t) { double s = p.displacement(t); return 0.5 * s * s; },
                       std::vector<double>(g.size(), 1.0), Segment::Term::Form::constant});
  return seg;
}

/// Harmonic-oscillator eigenfunction χ_n sampled on the grid (three-term recurrence).
inline Wavefunction fock_state(const Grid1D& g, int n) {
  Wavefunction prev(g), cur(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double x = g.x(i);
    cur[i] = std::exp(-0.5 * x * x) / std::pow(std::numbers::pi, 0.25);
  }
  for (int k = 0; k < n; ++k) {
    Wavefunction next(g);
    double a = std::sqrt(2.0 / (k + 1)), b = std::sqrt(static_cast<double>(k) / (k + 1));
    for (std::size_t i = 0; i < g.size(); ++i) next[i] = a * g.x(i) * cur[i] - b * prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

struct CouplingC {
  cplx quadrature;
  cplx closed_form;
  double relative_difference = 0.0;
  /// False when 2ω²σt² ≫ 1 or t0 ≫ √2σt is not satisfied.
  bool closed_form_valid = true;
};

/// C = √(2/π) ∫ x(t) e^{−it} dt over the pulse segment, and its closed form −i δxσt e^{iφ}.
inline CouplingC transition_amplitude_C(const PulseSpec& p) {
  p.validate();
  // Composite Simpson with 256 nodes per trap period.
  const double T = p.duration();
  auto n = static_cast<std::size_t>(std::ceil(T / two_pi * 256.0));
  n += n % 2;
  const double h = T / static_cast<double>(n);
  cplx acc{};
  for (std::size_t i = 0; i <= n; ++i) {
    double t = static_cast<double>(i) * h;
    double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * p.displacement(t) * std::polar(1.0, -t);
  }
  CouplingC c;
  c.quadrature = std::sqrt(2.0 / std::numbers::pi) * acc * h / 3.0;
  c.closed_form = cplx(0.0, -1.0) * p.product() * std::polar(1.0, p.phi);
  double scale = std::abs(c.closed_form);
  c.relative_difference = scale > 0 ? std::abs(c.quadrature - c.closed_form) / scale : std::abs(c.quadrature);
  c.closed_form_valid = 2.0 * p.sigma_t * p.sigma_t > 100.0 && p.t0 >= 3.0 * std::sqrt(2.0) * p.sigma_t;
  return c;
}

/// T_m0 = T00 (iC*)^m / √m!, with |T00| = exp(−|C|²/2) from the norm identity.
inline cplx analytic_Tm0(const PulseSpec& p, int m) {
  cplx c = transition_amplitude_C(p).quadrature;
  cplx t = std::exp(-0.5 * std::norm(c));
  cplx f = cplx(0.0, 1.0) * std::conj(c);
  for (int k = 1; k <= m; ++k) t *= f / std::sqrt(static_cast<double>(k));
  return t;
}

struct FirstPulse {
  double dx_sigma_t = 0.0;
  double phi = 0.0;
  double epsilon = 0.0;
};

/// First pulse for B† on a ground state displaced to x̄: |T00|² = x̄²/(x̄² + 2), the weight of χ0
/// in the two-level target ζ0χ0 + ζ1χ1 with ζ1²/ζ0² = 2/x̄².
inline FirstPulse optimal_first_pulse(double xbar) {
  if (!(std::abs(xbar) > 1.0)) throw ConfigError("optimal_first_pulse: |xbar| must exceed 1");
  double x2 = xbar * xbar;
  return {std::sqrt(std::log1p(2.0 / x2)), std::numbers::pi, 2.0 / (x2 * x2)};
}

struct TransitionTable {
  /// T[m][n] = ⟨χ_m|U|χ_n⟩ in the interaction picture (free phases removed).
  std::vector<std::vector<cplx>> T;
  std::string method;
  std::vector<int> flagged_columns;
};

/// Propagates χ_n (n ≤ n_max) through the pulse segment and projects onto χ_m.
inline TransitionTable extract_Tmn(const PulseSpec& p, int n_max, const Grid1D& g = Grid1D::production(),
                                   double dt = default_dt, std::size_t workers = 1) {
  if (n_max < 0 || n_max > 30) throw ConfigError("extract_Tmn: n_max must lie in [0, 30]");
  constexpr int extra = 10;
  const int rows = n_max + 1 + extra;
  std::vector<Wavefunction> fock;
  for (int m = 0; m < rows; ++m) fock.push_back(fock_state(g, m));
  Schedule sched{g, dt, {pulse_segment(g, p, dt)}};
  const double T = sched.duration();

  TransitionTable table{std::vector<std::vector<cplx>>(static_cast<std::size_t>(n_max + 1),
                                                       std::vector<cplx>(static_cast<std::size_t>(n_max + 1))),
                        "simulated", {}};
  std::vector<double> deficit(static_cast<std::size_t>(n_max + 1));
  parallel_for(static_cast<std::size_t>(n_max + 1), workers, [&](std::size_t n) {
    auto out = evolve_schedule(fock[n], sched).final_state;
    double sum = 0.0;
    for (int m = 0; m < rows; ++m) {
      cplx a = inner_product(fock[static_cast<std::size_t>(m)], out) * std::polar(1.0, (m + 0.5) * T);
      sum += std::norm(a);
      if (m <= n_max) table.T[static_cast<std::size_t>(m)][n] = a;
    }
    deficit[n] = 1.0 - sum;
  });
  for (int n = 0; n <= n_max; ++n)
    if (deficit[static_cast<std::size_t>(n)] > 1e-4) table.flagged_columns.push_back(n);
  return table;
}

/// Analytic column-0 table in the same layout (other columns left zero).
inline TransitionTable analytic_table(const PulseSpec& p, int n_max) {
  TransitionTable t{std::vector<std::vector<cplx>>(static_cast<std::size_t>(n_max + 1),
                                                   std::vector<cplx>(static_cast<std::size_t>(n_max + 1))),
                    "analytic", {}};
  for (int m = 0; m <= n_max; ++m) t.T[static_cast<std::size_t>(m)][0] = analytic_Tm0(p, m);
  return t;
}

struct SearchBox {
  double product_min = 0.0;
  double product_max = 0.1 * two_pi;
  double phi_min = -std::numbers::pi;
  double phi_max = std::numbers::pi;
};

struct OptimizerOptions {
  SearchBox box;
  std::size_t coarse_points = 41;
  /// The coarse scan runs on this grid/step (targets are resampled onto it).
  std::size_t coarse_n = 128;
  double coarse_dt = two_pi / 64.0;
  double sigma_t = 2.0 * two_pi;
  double tolerance = 1e-4;
  std::size_t workers = 1;
};

struct PulseOptimum {
  PulseSpec pulse;
  double fidelity = 0.0;
  bool edge_warning = false;
  std::vector<std::string> notes;
};

namespace detail {

/// Every `stride`-th sample of psi, which lands exactly on the coarser grid's points.
inline Wavefunction subsample(const Wavefunction& psi, std::size_t n) {
  const auto& g = psi.grid();
  if (n >= g.size()) return psi;
  Grid1D coarse(g.x_min(), g.x_max(), n);
  const std::size_t stride = g.size() / n;
  Wavefunction out(coarse);
  for (std::size_t i = 0; i < n; ++i) out[i] = psi[i * stride];
  return out;
}

struct PulseObjective {
  Wavefunction psi;
  Wavefunction target;  // U_free(T) B†ψ, normalized
  double dt;
  double sigma_t;

  double operator()(double product, double phi) const {
    auto p = PulseSpec::from_product(product, phi, sigma_t);
    Schedule s{psi.grid(), dt, {pulse_segment(psi.grid(), p, dt)}};
    auto out = evolve_schedule(psi, s).final_state;
    return std::abs(inner_product(target, out)) / out.norm();
  }
};

inline PulseObjective make_objective(const Wavefunction& psi, const Superpotential& w, double dt, double sigma_t) {
  auto psi_n = psi.normalized();
  auto b = apply_B_dagger(w, psi_n).psi;
  auto harmonic = sample_on(psi.grid(), [](double x) { return 0.5 * x * x; });
  auto target = split_step(b, harmonic, dt, step_count(10.0 * sigma_t, dt)).final_state.normalized();
  return {psi_n, target, dt, sigma_t};
}

/// Golden-section maximization of f on [a, b].
template <class F>
double golden_max(F&& f, double a, double b, double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

}  // namespace detail

/// Maximizes |⟨U_free B†ψ/‖B†ψ‖, U_pulse ψ⟩| over (δxσt, φ): coarse grid scan on a reduced grid,
/// then golden-section refinement of each axis at full resolution.
inline PulseOptimum optimize_second_pulse(const Wavefunction& psi_target, const Superpotential& w,
                                          const OptimizerOptions& opt = {}, double dt = default_dt) {
  if (opt.coarse_points < 3) throw ConfigError("optimizer: coarse_points must be at least 3");
  PulseOptimum result;
  SearchBox box = opt.box;
  auto coarse = detail::make_objective(detail::subsample(psi_target, opt.coarse_n), w, opt.coarse_dt, opt.sigma_t);
  auto fine = detail::make_objective(psi_target, w, dt, opt.sigma_t);

  const std::size_t m = opt.coarse_points;
  double best_p = 0.0, best_phi = 0.0, dp = 0.0, dphi = 0.0;
  for (int attempt = 0; attempt < 2; ++attempt) {
    dp = (box.product_max - box.product_min) / static_cast<double>(m - 1);
    dphi = (box.phi_max - box.phi_min) / static_cast<double>(m - 1);
    std::vector<double> values(m * m);
    parallel_for(m * m, opt.workers, [&](std::size_t k) {
      values[k] = coarse(box.product_min + static_cast<double>(k / m) * dp,
                         box.phi_min + static_cast<double>(k % m) * dphi);
    });
    // Row-major order with a strict comparison prefers smaller δxσt, then smaller φ.
    std::size_t arg = 0;
    for (std::size_t k = 1; k < values.size(); ++k)
      if (values[k] > values[arg]) arg = k;
    best_p = box.product_min + static_cast<double>(arg / m) * dp;
    best_phi = box.phi_min + static_cast<double>(arg % m) * dphi;
    bool at_edge = arg / m == m - 1 || (arg / m == 0 && box.product_min > 0);
    if (!at_edge) break;
    result.edge_warning = true;
    result.notes.push_back("optimum on search-box edge; box expanded");
    double width = box.product_max - box.product_min;
    box.product_min = std::max(0.0, box.product_min - width / 2);
    box.product_max += width / 2;
  }

  for (int pass = 0; pass < 2; ++pass) {
    best_phi = detail::golden_max([&](double phi) { return fine(best_p, phi); }, best_phi - dphi, best_phi + dphi,
                                  opt.tolerance);
    best_p = detail::golden_max([&](double p) { return fine(p, best_phi); }, std::max(0.0, best_p - dp), best_p + dp,
                                opt.tolerance);
    dp /= 4;
    dphi /= 4;
  }
  best_phi = std::remainder(best_phi, 2.0 * std::numbers::pi);
  result.pulse = PulseSpec::from_product(best_p, best_phi, opt.sigma_t);
  result.fidelity = fine(best_p, best_phi);
  return result;
}

}  // namespace susyq
