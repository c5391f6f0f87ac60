#pragma once

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "susy.hpp"

namespace susyq {

struct EigenOptions {
  /// Prefactor of −∂² (1/2 in oscillator units, 1 for the box convention).
  double kinetic = 0.5;
  /// Drop grid point 0 and put the second wall at x_max (box on [x_min, x_max]).
  bool interior_only = false;
  /// Callable-potential overload only: combine grids n and 2n as (4E_2n − E_n)/3.
  bool richardson = false;
};

struct SpectrumResult {
  std::vector<double> energies;
  std::vector<Wavefunction> states;
  std::string potential_id;
  double kinetic = 0.5;
};

namespace detail {

inline std::vector<double> sample(const PotentialFn& v, const Grid1D& g) {
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = v(g.x(i));
  return out;
}

}  // namespace detail

/// Lowest k eigenpairs of the central-difference Hamiltonian −κ∂² + V with Dirichlet walls just
/// outside the retained points. States are normalized (Σ|ψ|²dx = 1) with their largest lobe
/// closest to x_min made positive.
inline SpectrumResult eigensolve(std::span<const double> v, const Grid1D& grid, std::size_t k,
                                 const EigenOptions& opt = {}) {
  if (v.size() != grid.size()) throw ConfigError("eigensolve: potential does not match grid");
  if (k == 0 || k > grid.size() / 4) throw ConfigError("eigensolve: k must be in [1, n/4]");
  const std::size_t first = opt.interior_only ? 1 : 0;
  const auto m = static_cast<lapack_int>(grid.size() - first);
  const double h2 = grid.dx() * grid.dx();
  std::vector<double> d(static_cast<std::size_t>(m)), e(static_cast<std::size_t>(m));
  for (lapack_int i = 0; i < m; ++i) {
    double vi = v[first + static_cast<std::size_t>(i)];
    if (!std::isfinite(vi)) throw ConfigError("eigensolve: potential is not finite on the retained points");
    d[static_cast<std::size_t>(i)] = 2.0 * opt.kinetic / h2 + vi;
    e[static_cast<std::size_t>(i)] = -opt.kinetic / h2;
  }
  lapack_int found = 0;
  std::vector<double> w(static_cast<std::size_t>(m));
  std::vector<double> z(static_cast<std::size_t>(m) * k);
  std::vector<lapack_int> support(2 * k);
  lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', m, d.data(), e.data(), 0.0, 0.0, 1,
                                   static_cast<lapack_int>(k), 0.0, &found, w.data(), z.data(), m, support.data());
  if (info != 0 || found != static_cast<lapack_int>(k))
    throw NumericalError("eigensolve: dstevr failed (info=" + std::to_string(info) + ")");

  SpectrumResult r;
  r.kinetic = opt.kinetic;
  r.energies.assign(w.begin(), w.begin() + static_cast<long>(k));
  const double scale = 1.0 / std::sqrt(grid.dx());
  for (std::size_t j = 0; j < k; ++j) {
    const double* col = z.data() + j * static_cast<std::size_t>(m);
    double sup = 0.0;
    for (lapack_int i = 0; i < m; ++i) sup = std::max(sup, std::abs(col[i]));
    double sign = 1.0;
    for (lapack_int i = 0; i < m; ++i)
      if (std::abs(col[i]) > 0.5 * sup) {
        sign = col[i] > 0 ? 1.0 : -1.0;
        break;
      }
    Wavefunction psi(grid);
    for (lapack_int i = 0; i < m; ++i) psi[first + static_cast<std::size_t>(i)] = sign * scale * col[i];
    r.states.push_back(std::move(psi));
  }
  return r;
}

/// Same as above for a potential given as a function; allows Richardson extrapolation in dx².
inline SpectrumResult eigensolve(const PotentialFn& v, const Grid1D& grid, std::size_t k, const EigenOptions& opt = {}) {
  auto coarse = eigensolve(detail::sample(v, grid), grid, k, opt);
  if (!opt.richardson) return coarse;
  auto fine_grid = grid.refined();
  auto fine = eigensolve(detail::sample(v, fine_grid), fine_grid, k, opt);
  for (std::size_t j = 0; j < k; ++j) coarse.energies[j] = (4.0 * fine.energies[j] - coarse.energies[j]) / 3.0;
  return coarse;
}

/// Spectral application of −κ∂² + V.
inline Wavefunction apply_hamiltonian(const Wavefunction& psi, std::span<const double> v, double kinetic = 0.5) {
  auto d2 = spectral_derivative(psi, 2).psi;
  return psi.multiplied(v) - kinetic * d2;
}

inline double energy_expectation(const Wavefunction& psi, std::span<const double> v, double kinetic = 0.5) {
  return inner_product(psi, apply_hamiltonian(psi, v, kinetic)).real() / psi.norm_squared();
}

struct IsospectralReport {
  std::vector<double> e1;
  std::vector<double> e2;
  /// |E1_n − E2_{n+w}| for n = 0..k−1.
  std::vector<double> delta;
  double max_delta = 0.0;
  std::optional<double> unpaired_zero;
  SusyClass susy;
  bool passed = false;
  std::string potential_id;
};

/// Solves both partners with the same grid and pairs E1_n with E2_{n+w}. The Witten index comes
/// from the superpotential when present; otherwise from whether H2's ground energy is below tol.
inline IsospectralReport isospectral_report(const PotentialPair& pair, const Grid1D& grid, std::size_t k, double tol,
                                            EigenOptions opt = {}) {
  opt.kinetic = kinetic_prefactor(pair.units);
  auto solve = [&](const std::vector<double>& samples, const PotentialFn& fn, std::size_t count) {
    return fn ? eigensolve(fn, grid, count, opt).energies : eigensolve(samples, grid, count, opt).energies;
  };
  IsospectralReport r;
  r.potential_id = pair.id;
  r.e1 = solve(pair.v1, pair.v1_fn, k + 1);
  r.e2 = solve(pair.v2, pair.v2_fn, k + 1);
  if (pair.source) {
    r.susy = pair.source->classify();
    // A zero mode owned by H1 (reversed asymptotics) shifts the pairing the other way.
    if (!r.susy.broken && pair.source->asymptotics().at_plus < 0) std::swap(r.e1, r.e2);
  } else {
    bool zero = std::abs(r.e2.front()) < tol;
    r.susy = {!zero, zero ? 1 : 0};
  }
  const std::size_t w = static_cast<std::size_t>(r.susy.witten_index);
  if (w == 1) r.unpaired_zero = r.e2.front();
  for (std::size_t n = 0; n < k; ++n) r.delta.push_back(std::abs(r.e1[n] - r.e2[n + w]));
  r.max_delta = *std::max_element(r.delta.begin(), r.delta.end());
  r.passed = r.max_delta < tol && (!r.unpaired_zero || std::abs(*r.unpaired_zero) < tol);
  r.e1.resize(k);
  r.e2.resize(k + w);
  return r;
}

/// Box example in the unit-kinetic convention on [0, 1): W = −π cot(πx) gives the flat
/// V2 = −π² (levels π²(n²−1), zero mode sin(πx)) and V1 = π²(2/sin²(πx) − 1).
inline PotentialPair box_pair(const Grid1D& grid) {
  using std::numbers::pi;
  PotentialPair p;
  p.units = Units::unit_kinetic;
  p.id = "box";
  p.v1_fn = [](double x) {
    double s = std::sin(pi * x);
    return s == 0.0 ? std::numeric_limits<double>::infinity() : pi * pi * (2.0 / (s * s) - 1.0);
  };
  p.v2_fn = [](double) { return -pi * pi; };
  p.v1 = detail::sample(p.v1_fn, grid);
  p.v2 = detail::sample(p.v2_fn, grid);
  return p;
}

/// Grid for the box example: [0, 1) with the walls at the two ends.
inline Grid1D box_grid(std::size_t n = 2048) { return {0.0, 1.0, n}; }

inline EigenOptions box_options() { return {1.0, true, false}; }

/// Energies of V_η for every η (rows) and the lowest k levels (columns).
inline std::vector<std::vector<double>> eta_spectrum_sweep(double A, std::span<const double> etas, std::size_t k,
                                                           const Grid1D& grid, const EigenOptions& opt = {},
                                                           std::size_t workers = 1, double sigma = 0.5) {
  for (double eta : etas)
    if (eta < -3.0 || eta > 3.0) throw ConfigError("eta_spectrum_sweep: eta must lie in [-3, 3]");
  std::vector<std::vector<double>> out(etas.size());
  parallel_for(etas.size(), workers, [&](std::size_t i) {
    out[i] = eigensolve(eta_potential_fn(etas[i], A, sigma), grid, k, opt).energies;
  });
  return out;
}

/// max_n |E_{n+1}(η) − (E_n(0) + 1)| over the `paired` lowest reference levels.
inline double eta_pairing_mismatch(std::span<const double> at_eta, std::span<const double> at_zero, std::size_t paired) {
  if (at_eta.size() < paired + 1 || at_zero.size() < paired)
    throw ConfigError("eta_pairing_mismatch: not enough levels");
  double m = 0.0;
  for (std::size_t n = 0; n < paired; ++n) m = std::max(m, std::abs(at_eta[n + 1] - (at_zero[n] + 1.0)));
  return m;
}

/// Normalized Bψ for an H2 eigenstate; throws on the zero mode, which B annihilates.
inline Wavefunction map_eigenstate(const Superpotential& w, const Wavefunction& psi, double tol = 1e-6) {
  auto b = apply_B(w, psi).psi;
  if (b.norm_squared() < tol * psi.norm_squared())
    throw NumericalError("map_eigenstate: state is annihilated by B (zero mode)");
  return b.normalized();
}

}  // namespace susyq
