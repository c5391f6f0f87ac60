#pragma once

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "fft.hpp"
#include "grid.hpp"
#include "parallel.hpp"

namespace susyq {

/// Square box [−L, L)² with n points per axis; storage is row-major with x fastest.
class Grid2D {
 public:
  Grid2D(double half_width, std::size_t n) : L_(half_width), n_(n) {
    if (n < 16 || !std::has_single_bit(n)) throw ConfigError("grid2d: n must be a power of two >= 16");
    if (!(half_width > 0)) throw ConfigError("grid2d: half-width must be positive");
  }

  double half_width() const { return L_; }
  std::size_t n() const { return n_; }
  std::size_t size() const { return n_ * n_; }
  double dx() const { return 2.0 * L_ / static_cast<double>(n_); }
  double coord(std::size_t i) const { return -L_ + static_cast<double>(i) * dx(); }

  /// FFT-ordered wavenumbers; the Nyquist entry keeps its sign so that p·p equals p².
  std::vector<double> wavenumbers() const { return Grid1D(-L_, L_, n_).wavenumbers(false); }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  double L_;
  std::size_t n_;
};

/// Landau gauge A_x = B y + shift, A_y = 0 (ħ = m = 1, ω_c = B, r0 = 1/√B). The Zeeman term is
/// (g/4) B_z σ_z with B_z = −B, so spin-up carries the zero modes at g = 2.
struct GaugeConfig {
  double B = 1.0;
  double g = 2.0;
  /// Constant added to A_x (a pure gauge shift).
  double shift = 0.0;
  /// Scalar potential on the grid (row-major); empty means V = 0.
  std::vector<double> V;

  void validate(const Grid2D& grid) const {
    if (!(B > 0)) throw ConfigError("gauge: B must be positive");
    if (!std::isfinite(g)) throw ConfigError("gauge: g must be finite");
    if (!V.empty() && V.size() != grid.size()) throw ConfigError("gauge: V does not match the grid");
    if (grid.half_width() < 8.0 / std::sqrt(B)) throw ConfigError("gauge: half-width must be at least 8 r0");
  }
};

inline std::vector<double> harmonic_potential_2d(const Grid2D& grid, double omega) {
  std::vector<double> v(grid.size());
  for (std::size_t iy = 0; iy < grid.n(); ++iy)
    for (std::size_t ix = 0; ix < grid.n(); ++ix) {
      double x = grid.coord(ix), y = grid.coord(iy);
      v[iy * grid.n() + ix] = 0.5 * omega * omega * (x * x + y * y);
    }
  return v;
}

struct Spinor2D {
  std::vector<cplx> up;
  std::vector<cplx> down;

  explicit Spinor2D(std::size_t size = 0) : up(size), down(size) {}

  friend Spinor2D operator+(Spinor2D a, const Spinor2D& b) {
    for (std::size_t i = 0; i < a.up.size(); ++i) {
      a.up[i] += b.up[i];
      a.down[i] += b.down[i];
    }
    return a;
  }
  friend Spinor2D operator-(Spinor2D a, const Spinor2D& b) {
    for (std::size_t i = 0; i < a.up.size(); ++i) {
      a.up[i] -= b.up[i];
      a.down[i] -= b.down[i];
    }
    return a;
  }
  friend Spinor2D operator*(cplx s, Spinor2D a) {
    for (auto& v : a.up) v *= s;
    for (auto& v : a.down) v *= s;
    return a;
  }
};

inline cplx inner_product(const Grid2D& g, const Spinor2D& a, const Spinor2D& b) {
  cplx s{};
  for (std::size_t i = 0; i < a.up.size(); ++i) s += std::conj(a.up[i]) * b.up[i] + std::conj(a.down[i]) * b.down[i];
  return s * g.dx() * g.dx();
}

inline double norm(const Grid2D& g, const Spinor2D& a) { return std::sqrt(inner_product(g, a, a).real()); }

/// Sum of three Gaussians with random centers (|x|, |y| < L/5), widths in [0.6, 1] (in units of
/// the grid's half-width/10) and complex weights, independently for each component.
inline Spinor2D random_decayed_spinor(const Grid2D& g, std::mt19937_64& rng) {
  const double unit = g.half_width() / 10.0;
  std::uniform_real_distribution<double> center(-g.half_width() / 5.0, g.half_width() / 5.0),
      width(0.6 * unit, 1.0 * unit), coef(-1.0, 1.0);
  Spinor2D s(g.size());
  for (auto* comp : {&s.up, &s.down})
    for (int k = 0; k < 3; ++k) {
      double cx = center(rng), cy = center(rng), w = width(rng);
      cplx a(coef(rng), coef(rng));
      for (std::size_t iy = 0; iy < g.n(); ++iy)
        for (std::size_t ix = 0; ix < g.n(); ++ix) {
          double dx = g.coord(ix) - cx, dy = g.coord(iy) - cy;
          (*comp)[iy * g.n() + ix] += a * std::exp(-(dx * dx + dy * dy) / (2.0 * w * w));
        }
    }
  return s;
}

/// Pauli Hamiltonian and the two supercharges in the Landau gauge, applied with spectral momenta.
class PauliOperator {
 public:
  PauliOperator(Grid2D grid, GaugeConfig cfg)
      : grid_(grid),
        cfg_(std::move(cfg)),
        rows_(grid.n(), grid.n(), 1, static_cast<int>(grid.n()), grid.size()),
        cols_(grid.n(), grid.n(), static_cast<int>(grid.n()), 1, grid.size()),
        k_(grid.wavenumbers()) {
    cfg_.validate(grid_);
  }

  const Grid2D& grid() const { return grid_; }
  const GaugeConfig& config() const { return cfg_; }

  /// π_x f = (p_x + B y + shift) f.
  std::vector<cplx> pi_x(std::span<const cplx> f) {
    auto out = derivative(f, rows_, 1);
    const auto n = grid_.n();
    for (std::size_t iy = 0; iy < n; ++iy) {
      double a = vector_potential(iy);
      for (std::size_t ix = 0; ix < n; ++ix) out[iy * n + ix] += a * f[iy * n + ix];
    }
    return out;
  }

  /// π_y f = p_y f.
  std::vector<cplx> pi_y(std::span<const cplx> f) { return derivative(f, cols_, 1); }

  /// Scalar part (π_x² + π_y²)/2 + V on one component.
  std::vector<cplx> orbital(std::span<const cplx> f) {
    auto px = derivative(f, rows_, 1);
    auto px2 = derivative(f, rows_, 2);
    auto py2 = derivative(f, cols_, 2);
    const auto n = grid_.n();
    std::vector<cplx> out(f.size());
    for (std::size_t iy = 0; iy < n; ++iy) {
      double a = vector_potential(iy);
      for (std::size_t ix = 0; ix < n; ++ix) {
        auto i = iy * n + ix;
        out[i] = 0.5 * (px2[i] + py2[i]) + a * px[i] + 0.5 * a * a * f[i];
        if (!cfg_.V.empty()) out[i] += cfg_.V[i] * f[i];
      }
    }
    return out;
  }

  Spinor2D hamiltonian(const Spinor2D& s) {
    Spinor2D out;
    out.up = orbital(s.up);
    out.down = orbital(s.down);
    const double z = cfg_.g * cfg_.B / 4.0;
    for (std::size_t i = 0; i < s.up.size(); ++i) {
      out.up[i] -= z * s.up[i];
      out.down[i] += z * s.down[i];
    }
    return out;
  }

  /// Q1 = (−π_y σx + π_x σy)/2.
  Spinor2D q1(const Spinor2D& s) {
    // σx(u, d) = (d, u), σy(u, d) = (−i d, i u).
    auto pyu = pi_y(s.up), pyd = pi_y(s.down), pxu = pi_x(s.up), pxd = pi_x(s.down);
    Spinor2D out(s.up.size());
    const cplx i1(0.0, 1.0);
    for (std::size_t k = 0; k < s.up.size(); ++k) {
      out.up[k] = 0.5 * (-pyd[k] - i1 * pxd[k]);
      out.down[k] = 0.5 * (-pyu[k] + i1 * pxu[k]);
    }
    return out;
  }

  /// Q2 = (π_x σx + π_y σy)/2.
  Spinor2D q2(const Spinor2D& s) {
    auto pyu = pi_y(s.up), pyd = pi_y(s.down), pxu = pi_x(s.up), pxd = pi_x(s.down);
    Spinor2D out(s.up.size());
    const cplx i1(0.0, 1.0);
    for (std::size_t k = 0; k < s.up.size(); ++k) {
      out.up[k] = 0.5 * (pxd[k] - i1 * pyd[k]);
      out.down[k] = 0.5 * (pxu[k] + i1 * pyu[k]);
    }
    return out;
  }

  double vector_potential(std::size_t iy) const { return cfg_.B * grid_.coord(iy) + cfg_.shift; }

 private:
  std::vector<cplx> derivative(std::span<const cplx> f, detail::FftPlan& plan, int order) {
    const auto n = grid_.n();
    auto buf = plan.buffer();
    std::copy(f.begin(), f.end(), buf.begin());
    plan.forward();
    const double inv = 1.0 / static_cast<double>(n);
    bool along_x = &plan == &rows_;
    for (std::size_t iy = 0; iy < n; ++iy)
      for (std::size_t ix = 0; ix < n; ++ix) {
        double k = along_x ? k_[ix] : k_[iy];
        buf[iy * n + ix] *= inv * (order == 1 ? k : k * k);
      }
    plan.backward();
    return {buf.begin(), buf.end()};
  }

  Grid2D grid_;
  GaugeConfig cfg_;
  detail::FftPlan rows_;
  detail::FftPlan cols_;
  std::vector<double> k_;
};

struct SuperchargeResiduals {
  /// max ‖[H, Q_i]ψ‖ / (‖HQ_iψ‖ + ‖Q_iHψ‖)
  double r_comm = 0.0;
  /// max ‖(2Q_i² − H)ψ‖ / ‖Hψ‖
  double r_anti = 0.0;
  /// max ‖{Q1, Q2}ψ‖ / ‖Hψ‖
  double r_cross = 0.0;
};

inline SuperchargeResiduals supercharge_residuals(const Grid2D& grid, const GaugeConfig& cfg, std::size_t samples = 10,
                                                  std::uint64_t seed = 1) {
  PauliOperator op(grid, cfg);
  std::mt19937_64 rng(seed);
  SuperchargeResiduals r;
  for (std::size_t s = 0; s < samples; ++s) {
    auto psi = random_decayed_spinor(grid, rng);
    auto h = op.hamiltonian(psi);
    double hn = norm(grid, h);
    auto a = op.q1(psi), b = op.q2(psi);
    auto qa = op.q1(a), qb = op.q2(b);
    r.r_anti = std::max(r.r_anti, norm(grid, (2.0 * qa) - h) / hn);
    r.r_anti = std::max(r.r_anti, norm(grid, (2.0 * qb) - h) / hn);
    r.r_cross = std::max(r.r_cross, norm(grid, op.q1(b) + op.q2(a)) / hn);
    auto hq1 = op.hamiltonian(a), q1h = op.q1(h);
    auto hq2 = op.hamiltonian(b), q2h = op.q2(h);
    r.r_comm = std::max(r.r_comm, norm(grid, hq1 - q1h) / (norm(grid, hq1) + norm(grid, q1h)));
    r.r_comm = std::max(r.r_comm, norm(grid, hq2 - q2h) / (norm(grid, hq2) + norm(grid, q2h)));
  }
  return r;
}

struct LandauLevel {
  double energy = 0.0;
  std::size_t multiplicity = 0;
};

struct LandauSpectrum {
  std::vector<LandauLevel> up;
  std::vector<LandauLevel> down;
  /// Orbital (Zeeman-free) bulk levels shared by both sectors.
  std::vector<LandauLevel> orbital;
  bool boundary_flag = false;
  std::vector<std::string> notes;
};

namespace detail {

/// Real symmetric matrix of −∂²/2 under periodic spectral differentiation.
inline std::vector<double> spectral_kinetic_matrix(const Grid2D& g) {
  const auto n = g.n();
  auto k = g.wavenumbers();
  std::vector<double> m(n * n);
  // Circulant: first column c_j = (1/n) Σ_k (k²/2) e^{ikx_j}, real by symmetry.
  std::vector<double> c(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t q = 0; q < n; ++q)
      s += 0.5 * k[q] * k[q] * std::cos(2.0 * std::numbers::pi * static_cast<double>(q * j % n) / static_cast<double>(n));
    c[j] = s / static_cast<double>(n);
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) m[a * n + b] = c[(a + n - b) % n];
  return m;
}

}  // namespace detail

/// Bulk levels of the Landau problem by exact reduction over k_x: each x-Fourier block is the
/// 1D problem p_y²/2 + (k + B y + shift)²/2 + V(y). States with more than 1e-6 of their weight in
/// |y| > 0.8L touch the box and are excluded. V must be zero or depend on y only.
inline LandauSpectrum landau_spectrum(const Grid2D& grid, const GaugeConfig& cfg, std::size_t levels,
                                      std::size_t workers = 1, double cluster_tol = 1e-6) {
  cfg.validate(grid);
  const auto n = grid.n();
  std::vector<double> vy(n, 0.0);
  if (!cfg.V.empty()) {
    for (std::size_t iy = 0; iy < n; ++iy) {
      vy[iy] = cfg.V[iy * n];
      for (std::size_t ix = 1; ix < n; ++ix)
        if (std::abs(cfg.V[iy * n + ix] - vy[iy]) > 1e-14 * std::max(1.0, std::abs(vy[iy])))
          throw ConfigError("landau_spectrum: V must depend on y only");
    }
  }
  const auto kin = detail::spectral_kinetic_matrix(grid);
  const auto kx = grid.wavenumbers();
  const std::size_t per_block = levels + 2;
  std::vector<std::vector<double>> bulk(n);

  parallel_for(n, workers, [&](std::size_t b) {
    std::vector<double> a = kin;
    for (std::size_t iy = 0; iy < n; ++iy) {
      double p = kx[b] + cfg.B * grid.coord(iy) + cfg.shift;
      a[iy * n + iy] += 0.5 * p * p + vy[iy];
    }
    const auto m = static_cast<lapack_int>(n);
    lapack_int found = 0;
    std::vector<double> w(n), z(n * per_block);
    std::vector<lapack_int> support(2 * per_block);
    lapack_int info = LAPACKE_dsyevr(LAPACK_ROW_MAJOR, 'V', 'I', 'U', m, a.data(), m, 0.0, 0.0, 1,
                                     static_cast<lapack_int>(per_block), 0.0, &found, w.data(), z.data(),
                                     static_cast<lapack_int>(per_block), support.data());
    if (info != 0) throw NumericalError("landau_spectrum: dsyevr failed");
    for (lapack_int j = 0; j < found; ++j) {
      double outer = 0.0;
      for (std::size_t iy = 0; iy < n; ++iy) {
        double amp = z[iy * per_block + static_cast<std::size_t>(j)];
        if (std::abs(grid.coord(iy)) > 0.8 * grid.half_width()) outer += amp * amp;
      }
      if (outer < 1e-6) bulk[b].push_back(w[static_cast<std::size_t>(j)]);
    }
  });

  std::vector<double> all;
  for (const auto& v : bulk) all.insert(all.end(), v.begin(), v.end());
  std::sort(all.begin(), all.end());
  LandauSpectrum out;
  for (double e : all) {
    if (!out.orbital.empty() && e - out.orbital.back().energy <= cluster_tol * std::max(1.0, std::abs(e))) {
      ++out.orbital.back().multiplicity;
    } else {
      if (out.orbital.size() == levels) break;
      out.orbital.push_back({e, 1});
    }
  }
  if (out.orbital.size() < levels) {
    out.boundary_flag = true;
    out.notes.push_back("fewer bulk levels than requested; enlarge the box");
  }
  const double z = cfg.g * cfg.B / 4.0;
  for (const auto& l : out.orbital) {
    out.up.push_back({l.energy - z, l.multiplicity});
    out.down.push_back({l.energy + z, l.multiplicity});
  }
  return out;
}

struct PairingPoint {
  double eta = 0.0;
  /// min over pairing direction of max_n |E_{n+1} − E'_n| (zero modes excluded).
  double mismatch = 0.0;
  /// max_n |E↑_n − E↓_n| without any index shift.
  double unshifted = 0.0;
  bool boundary_flag = false;
};

/// g = 2η sweep of the spin-sector pairing. The orbital problem does not depend on g, so it is
/// solved once and each sector is shifted by its Zeeman energy.
inline std::vector<PairingPoint> eta_detune_sweep(const Grid2D& grid, GaugeConfig cfg, std::span<const double> etas,
                                                  std::size_t levels, std::size_t workers = 1) {
  if (levels < 2) throw ConfigError("eta_detune_sweep: need at least two levels");
  cfg.g = 2.0;
  auto base = landau_spectrum(grid, cfg, levels, workers);
  std::vector<PairingPoint> out;
  for (double eta : etas) {
    const double z = 2.0 * eta * cfg.B / 4.0;
    PairingPoint p{eta, 0.0, 0.0, base.boundary_flag};
    double fwd = 0.0, bwd = 0.0;
    const auto m = base.orbital.size();
    for (std::size_t k = 0; k + 1 < m; ++k) {
      double up_next = base.orbital[k + 1].energy - z, down_k = base.orbital[k].energy + z;
      double down_next = base.orbital[k + 1].energy + z, up_k = base.orbital[k].energy - z;
      fwd = std::max(fwd, std::abs(up_next - down_k));
      bwd = std::max(bwd, std::abs(down_next - up_k));
    }
    for (std::size_t k = 0; k < m; ++k)
      p.unshifted = std::max(p.unshifted, std::abs((base.orbital[k].energy - z) - (base.orbital[k].energy + z)));
    p.mismatch = std::min(fwd, bwd);
    out.push_back(p);
  }
  return out;
}

}  // namespace susyq
