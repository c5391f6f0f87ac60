#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include <susyq/gauge2d.hpp>
#include <susyq/interferometer.hpp>
#include <susyq/shaking.hpp>
#include <susyq/spectrum.hpp>

using namespace susyq;

namespace {

const double A_main = std::sqrt(26.0);

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Verdict {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [fail]");
  }
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

ProtocolConfig main_protocol(double xbar) {
  ProtocolConfig p;
  p.xbar = xbar;
  p.A = A_main;
  return p;
}

const std::vector<double> sweep_eta = linspace_step(-3, 3, 0.05);
const std::vector<double> sweep_tr = [] {
  auto v = linspace_step(0, 10, 0.25);
  for (auto& t : v) t *= two_pi;
  return v;
}();

std::size_t nearest(const std::vector<double>& grid, double target) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (std::abs(grid[i] - target) < std::abs(grid[best] - target)) best = i;
  return best;
}

// Peak at η ≈ 1 and the largest averaged contrast away from both matched barriers.
struct Margin {
  double peak = 0.0;
  double residual = 0.0;
  double value() const { return peak - residual; }
};

Margin margin_of(const ContrastMap& m) {
  Margin r;
  r.peak = m.averaged[nearest(m.eta, 1.0)];
  for (std::size_t j = 0; j < m.eta.size(); ++j)
    if (std::abs(m.eta[j] - 1.0) > 0.5 && std::abs(m.eta[j] + 1.0) > 0.5) r.residual = std::max(r.residual, m.averaged[j]);
  return r;
}

bool bitwise_equal(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].size() != b[i].size() || std::memcmp(a[i].data(), b[i].data(), a[i].size() * sizeof(double)) != 0)
      return false;
  return true;
}

ContrastMap timed_sweep(double xbar, std::size_t nw, double& seconds) {
  auto t0 = std::chrono::steady_clock::now();
  auto m = contrast_map(main_protocol(xbar), sweep_tr, sweep_eta, nw);
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return m;
}

// Shared between the sweep-based criteria.
struct Sweeps {
  ContrastMap main_n, main_1, shallow;
  double t_main_n = 0, t_main_1 = 0, t_shallow = 0;
};

Verdict contrast_peak(const Sweeps& s) {
  Verdict v;
  const auto& m = s.main_n;
  v.check(m.failures.empty(), std::to_string(m.failures.size()) + " failed cells");
  std::vector<std::size_t> peaks;
  for (std::size_t j = 0; j < m.eta.size(); ++j) {
    double left = j ? m.averaged[j - 1] : -1.0, right = j + 1 < m.eta.size() ? m.averaged[j + 1] : -1.0;
    if (m.averaged[j] >= left && m.averaged[j] >= right) peaks.push_back(j);
  }
  std::sort(peaks.begin(), peaks.end(), [&](auto a, auto b) { return m.averaged[a] > m.averaged[b]; });
  bool two = peaks.size() >= 2;
  double e0 = two ? m.eta[peaks[0]] : NAN, e1 = two ? m.eta[peaks[1]] : NAN;
  bool at_pm1 = two && std::min(e0, e1) == m.eta[nearest(m.eta, -1.0)] && std::max(e0, e1) == m.eta[nearest(m.eta, 1.0)];
  v.check(at_pm1, fmt("two largest maxima at eta=%g, %g", e0, e1));
  auto mg = margin_of(m);
  v.check(mg.peak > 0.999, fmt("averaged C(eta=1)=%.6f", mg.peak));
  double worst_t = 1.0;
  for (const auto& row : m.contrast) worst_t = std::min(worst_t, row[nearest(m.eta, 1.0)]);
  v.detail += fmt(" (min over t_r %.6f)", worst_t);
  v.check(mg.residual < 0.9, fmt("max averaged away from |eta|=1: %.4f", mg.residual));
  v.detail += fmt("; %.0f s with %g workers", s.t_main_n, static_cast<double>(std::max<std::size_t>(4, workers())));
  v.detail += fmt(" on %g cores", static_cast<double>(workers()));
  return v;
}

Verdict isospectrality() {
  Verdict v;
  auto g = Grid1D::production();
  EigenOptions opt{0.5, false, true};
  auto main = isospectral_report(partner_potentials(Superpotential(HarmonicGaussian{A_main, 0.5}), g), g, 8, 1e-4, opt);
  v.check(main.max_delta < 1e-4, fmt("unbroken max|dE|=%.2e", main.max_delta));
  v.check(main.susy.witten_index == 1 && main.unpaired_zero && std::abs(*main.unpaired_zero) < 1e-4,
          fmt("extra H2 level %.2e, index %g", main.unpaired_zero.value_or(NAN), main.susy.witten_index));
  auto broken = isospectral_report(partner_potentials(Superpotential(TanhQuadratic{2.0, 0.5, 2.0}), g), g, 8, 1e-4, opt);
  v.check(broken.susy.broken && broken.susy.witten_index == 0, "broken classification");
  v.check(broken.max_delta < 1e-4, fmt("broken max|dE|=%.2e", broken.max_delta));
  // The broken ground level is small but shared by both partners; it must sit clearly above the
  // pairing error instead of appearing as an extra H2 level.
  double lowest = std::min(broken.e1.front(), broken.e2.front());
  v.check(!broken.unpaired_zero && lowest > 100 * broken.max_delta,
          fmt("no zero mode, paired lowest level %.4e (pairing error %.1e)", lowest, broken.max_delta));
  return v;
}

Verdict intertwining() {
  Verdict v;
  auto g = Grid1D::production();
  Superpotential w(HarmonicGaussian{A_main, 0.5});
  auto psi = displace(fock_state(g, 0), -5.0);
  const double dt = two_pi / 4096;
  double r = intertwining_residual(w, psi, 5 * two_pi, dt);
  v.check(r < 1e-4, fmt("residual %.2e at t=5 periods (dt=T/4096)", r));
  // The η family carries +1/2 relative to V2; remove it so only the barrier shape differs.
  auto v_eta2 = eta_potential(2.0, A_main, g);
  for (auto& x : v_eta2) x -= 0.5;
  double bad = intertwining_residual(w, psi, 5 * two_pi, dt, v_eta2);
  v.check(bad > 0.1, fmt("eta=2 control %.3f", bad));
  return v;
}

Verdict shaking() {
  Verdict v;
  auto first = optimal_first_pulse(-5.0);
  v.check(std::abs(first.dx_sigma_t / two_pi - 0.0442) < 5e-5, fmt("first pulse %.5f periods", first.dx_sigma_t / two_pi));
  v.check(std::abs(first.epsilon - 3.2e-3) < 1e-12, fmt("epsilon %.2e", first.epsilon));
  auto pulse = PulseSpec::from_product(first.dx_sigma_t, first.phi);
  auto t = extract_Tmn(pulse, 1, Grid1D::production(), default_dt, workers());
  double p00 = std::norm(t.T[0][0]), p10 = std::norm(t.T[1][0]);
  v.check(std::abs(p00 - 49.0 / 53.0) < 1e-2, fmt("|T00|^2=%.4f vs %.4f", p00, 49.0 / 53.0));
  v.check(std::abs(p10 - 4.0 / 53.0) < 1e-2, fmt("|T10|^2=%.4f vs %.4f", p10, 4.0 / 53.0));

  auto p = main_protocol(-5.0);
  p.t_r = 4 * two_pi;
  auto arm1 = evolve_schedule(displace(fock_state(p.grid, 0), p.xbar),
                              barrier_schedule(p.grid, p.dt, 0.0, p.A, p.sigma, p.timing()))
                  .final_state;
  OptimizerOptions opt;
  opt.workers = workers();
  auto second = optimize_second_pulse(arm1, detail::harmonic_w(), opt, p.dt);
  double prod = second.pulse.product() / two_pi, phi = second.pulse.phi / std::numbers::pi;
  v.check(std::abs(prod - 0.0470) <= 0.2 * 0.0470, fmt("second pulse %.5f periods", prod));
  v.check(std::abs(phi - 0.06) <= 0.2 * 0.06, fmt("phase %.4f pi", phi));
  v.check(second.fidelity >= 0.6, fmt("fidelity %.4f", second.fidelity));
  return v;
}

Verdict propagator_quality() {
  Verdict v;
  auto g = Grid1D::production();
  auto p = main_protocol(-5.0);
  p.t_r = 4 * two_pi;
  auto psi = apply_B_dagger(detail::harmonic_w(), displace(fock_state(g, 0), -5.0)).psi.normalized();
  auto sched = barrier_schedule(g, default_dt, 1.0, A_main, 0.5, p.timing());
  auto rep = evolve_schedule(psi, sched);
  double steps = sched.duration() / default_dt;
  double per_k = rep.norm_drift / steps * 1e3;
  v.check(per_k < 1e-10, fmt("norm drift %.2e per 1e3 steps", per_k));

  auto start = displace(fock_state(g, 0), -5.0);
  auto run = [&](double dt) {
    return evolve_schedule(start, barrier_schedule(g, dt, 1.0, A_main, 0.5, {two_pi, 0.0, two_pi})).final_state;
  };
  auto ref = run(two_pi / 4096);
  double e1 = (run(two_pi / 128) - ref).norm(), e2 = (run(two_pi / 256) - ref).norm();
  double order = std::log2(e1 / e2);
  v.check(std::abs(order - 2.0) <= 0.2, fmt("self-convergence order %.3f", order));

  auto harmonic = sample_on(g, [](double x) { return 0.5 * x * x; });
  double worst = 1.0;
  for (int n = 0; n < 4; ++n) {
    auto chi = fock_state(g, n);
    auto out = split_step(chi, harmonic, default_dt, 1024).final_state;
    worst = std::min(worst, fidelity(chi, out));
  }
  v.check(1.0 - worst < 1e-8, fmt("period-return infidelity %.2e", 1.0 - worst));
  return v;
}

Verdict eta_spectrum() {
  Verdict v;
  auto g = Grid1D::production();
  auto etas = linspace_step(-3, 3, 0.05);
  EigenOptions opt{0.5, false, true};
  auto levels = eta_spectrum_sweep(A_main, etas, 9, g, opt, workers());
  const auto& ref = levels[nearest(etas, 0.0)];
  std::vector<double> mismatch;
  for (const auto& row : levels) mismatch.push_back(eta_pairing_mismatch(row, ref, 8));
  auto global = std::min_element(mismatch.begin(), mismatch.end()) - mismatch.begin();
  double best = mismatch[static_cast<std::size_t>(global)];
  std::size_t at_one = nearest(etas, 1.0);
  double near_one = mismatch[at_one];
  for (std::size_t j : {at_one - 1, at_one + 1}) near_one = std::min(near_one, mismatch[j]);
  v.check(near_one == best, fmt("global minimum %.2e, within one step of eta=1: %.2e", best, near_one));
  v.detail += fmt(" (first argmin eta=%g, mirror at eta=-1 %.2e)", etas[static_cast<std::size_t>(global)],
                  mismatch[nearest(etas, -1.0)]);
  v.check(best < 1e-4, fmt("minimum %.2e", best));
  return v;
}

Verdict box_partner() {
  Verdict v;
  auto g = box_grid(2048);
  auto pair = box_pair(g);
  auto opt = box_options();
  auto wall = eigensolve(pair.v1, g, 4, opt).energies;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  double worst = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    double n = static_cast<double>(i + 2);
    worst = std::max(worst, std::abs(wall[i] / (pi2 * (n * n - 1)) - 1.0));
  }
  v.check(worst < 5e-3, fmt("max relative error n=2..5: %.2e", worst));
  auto flat = eigensolve(pair.v2, g, 2, opt).energies;
  v.check(std::abs(flat[0]) < 1e-3 * pi2, fmt("box-side zero mode %.2e", flat[0]));
  v.check(std::abs(flat[1] / (3 * pi2) - 1.0) < 5e-3, fmt("box first excited %.4f pi^2", flat[1] / pi2));
  return v;
}

Verdict algebra_2d() {
  Verdict v;
  auto t0 = std::chrono::steady_clock::now();
  Grid2D grid(10.0, 256);
  GaugeConfig cfg;
  auto r = supercharge_residuals(grid, cfg, 10, 1);
  double worst = std::max({r.r_comm, r.r_anti, r.r_cross});
  v.check(worst < 1e-6, fmt("supercharge residuals max %.2e", worst));
  auto s = landau_spectrum(grid, cfg, 5, workers());
  v.check(!s.boundary_flag && std::abs(s.up[0].energy) < 1e-2, fmt("lowest spin-up level %.2e", s.up[0].energy));
  double spacing = 0.0;
  for (std::size_t k = 0; k + 1 < s.orbital.size(); ++k)
    spacing = std::max(spacing, std::abs(s.orbital[k + 1].energy - s.orbital[k].energy - cfg.B) / cfg.B);
  v.check(spacing < 2e-2, fmt("spacing relative error %.2e", spacing));
  auto etas = linspace_step(-2, 2, 0.1);
  auto pts = eta_detune_sweep(grid, cfg, etas, 5, workers());
  double best = 1e300;
  for (const auto& pt : pts) best = std::min(best, pt.mismatch);
  std::vector<double> argmins;
  for (const auto& pt : pts)
    if (pt.mismatch == best) argmins.push_back(pt.eta);
  bool ok = !argmins.empty();
  for (double e : argmins) ok = ok && std::abs(std::abs(e) - 1.0) < 1e-9;
  v.check(ok, fmt("detuning argmin at eta=%g, %g", argmins.empty() ? NAN : argmins.front(),
                  argmins.empty() ? NAN : argmins.back()));
  v.detail += fmt("; %.0f s", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return v;
}

Verdict tradeoff(const Sweeps& s) {
  Verdict v;
  auto deep = margin_of(s.main_n), shallow = margin_of(s.shallow);
  v.check(deep.value() > shallow.value(), fmt("margin xbar=-5: %.4f", deep.value()) +
                                              fmt(" (peak %.4f, residual %.4f)", deep.peak, deep.residual) +
                                              fmt(" vs xbar=-3: %.4f", shallow.value()) +
                                              fmt(" (peak %.4f, residual %.4f)", shallow.peak, shallow.residual));
  return v;
}

Eigen::VectorXd dense_fd(const std::vector<double>& v, double dx) {
  const auto n = static_cast<Eigen::Index>(v.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h(i, i) = 1.0 / (dx * dx) + v[static_cast<std::size_t>(i)];
    if (i > 0) h(i, i - 1) = h(i - 1, i) = -0.5 / (dx * dx);
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues();
}

Verdict determinism(const Sweeps& s) {
  Verdict v;
  bool same = bitwise_equal(s.main_1.contrast, s.main_n.contrast) &&
              std::memcmp(s.main_1.averaged.data(), s.main_n.averaged.data(), s.main_1.averaged.size() * sizeof(double)) == 0;
  v.check(same, fmt("1 vs %g worker sweeps byte-identical", static_cast<double>(std::max<std::size_t>(4, workers()))));

  Grid1D g(-8, 8, 128);
  double worst = 0.0;
  for (double eta : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
    auto pot = eta_potential(eta, A_main, g);
    auto dense = dense_fd(pot, g.dx());
    auto banded = eigensolve(pot, g, 32).energies;
    for (std::size_t j = 0; j < banded.size(); ++j)
      worst = std::max(worst, std::abs(banded[j] - dense(static_cast<Eigen::Index>(j))));
  }
  v.check(worst < 1e-10, fmt("eigensolver vs dense oracle %.2e", worst));

  double gap = 0.0;
  for (double eta : {1.0, 1.5, 2.5}) {
    auto p = main_protocol(-5.0);
    p.eta = eta;
    p.t_r = 2 * two_pi;
    auto r = run_protocol(p);
    auto pat = interference_pattern(r.psi_f, r.psi_eta, two_pi / 0.5, -1, 1, 20001);
    gap = std::max(gap, std::abs(pat.fringe_contrast - r.contrast));
  }
  v.check(gap < 1e-6, fmt("fringe visibility vs contrast %.2e", gap));
  return v;
}

}  // namespace

int main() {
  Sweeps s;
  const std::size_t many = std::max<std::size_t>(4, workers());
  std::fprintf(stderr, "running contrast sweeps (3 x %zu x %zu cells)...\n", sweep_tr.size(), sweep_eta.size());
  s.main_n = timed_sweep(-5.0, many, s.t_main_n);
  s.main_1 = timed_sweep(-5.0, 1, s.t_main_1);
  s.shallow = timed_sweep(-3.0, many, s.t_shallow);

  std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"SUSY contrast peak", [&] { return contrast_peak(s); }},
      {"isospectrality", isospectrality},
      {"intertwining", intertwining},
      {"shaking analytics", shaking},
      {"propagator quality", propagator_quality},
      {"eta-spectrum sweep", eta_spectrum},
      {"box partner", box_partner},
      {"2D algebra", algebra_2d},
      {"depth trade-off", [&] { return tradeoff(s); }},
      {"determinism and oracles", [&] { return determinism(s); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failed += !v.pass;
    std::printf("%s [%zu] %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed ? 1 : 0;
}
