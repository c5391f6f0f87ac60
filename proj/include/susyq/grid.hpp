#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "fft.hpp"

namespace susyq {

using cplx = std::complex<double>;

/// Uniform periodic-style grid x_i = x_min + i*dx, i = 0..n-1, dx = (x_max - x_min)/n.
///
/// Units are dimensionless throughout the 1D core (hbar = m = omega = 1, so x0 = 1).
class Grid1D {
 public:
  Grid1D(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max), n_(n) {
    if (n < 16 || !std::has_single_bit(n)) throw ConfigError("grid: n must be a power of two >= 16");
    if (!(x_max > x_min)) throw ConfigError("grid: x_max must exceed x_min");
  }

  /// Default production grid: [-16, 16) with 1024 points.
  static Grid1D production() { return {-16.0, 16.0, 1024}; }

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return n_; }
  double dx() const { return (x_max_ - x_min_) / static_cast<double>(n_); }
  double length() const { return x_max_ - x_min_; }
  double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * dx(); }

  std::vector<double> points() const {
    std::vector<double> xs(n_);
    for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
    return xs;
  }

  /// FFT-ordered angular wavenumbers. With `zero_nyquist` the unpaired Nyquist entry is 0,
  /// which keeps first derivatives of real data real.
  std::vector<double> wavenumbers(bool zero_nyquist = false) const {
    std::vector<double> k(n_);
    double dk = 2.0 * std::numbers::pi / length();
    for (std::size_t j = 0; j < n_; ++j) {
      auto m = static_cast<double>(j < n_ / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n_));
      k[j] = m * dk;
    }
    if (zero_nyquist) k[n_ / 2] = 0.0;
    return k;
  }

  /// Same spacing and extent, twice the points.
  Grid1D refined() const { return {x_min_, x_max_, 2 * n_}; }

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
};

/// Complex amplitudes on a Grid1D. Value type; every operation returns a new wavefunction.
class Wavefunction {
 public:
  explicit Wavefunction(Grid1D grid) : grid_(grid), amp_(grid.size()) {}

  Wavefunction(Grid1D grid, std::vector<cplx> amp) : grid_(grid), amp_(std::move(amp)) {
    if (amp_.size() != grid_.size()) throw ConfigError("wavefunction: amplitude count does not match grid");
  }

  static Wavefunction from_function(const Grid1D& grid, const std::function<cplx(double)>& f) {
    Wavefunction psi(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) psi.amp_[i] = f(grid.x(i));
    return psi;
  }

  const Grid1D& grid() const { return grid_; }
  std::size_t size() const { return amp_.size(); }
  std::span<const cplx> amplitudes() const { return amp_; }
  std::span<cplx> amplitudes() { return amp_; }
  const cplx& operator[](std::size_t i) const { return amp_[i]; }
  cplx& operator[](std::size_t i) { return amp_[i]; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amp_) s += std::norm(a);
    return s * grid_.dx();
  }
  double norm() const { return std::sqrt(norm_squared()); }

  Wavefunction normalized() const {
    double nrm = norm();
    if (nrm == 0.0) throw NumericalError("wavefunction: cannot normalize a zero state");
    return (1.0 / nrm) * *this;
  }

  std::vector<double> density() const {
    std::vector<double> d(amp_.size());
    std::transform(amp_.begin(), amp_.end(), d.begin(), [](const cplx& a) { return std::norm(a); });
    return d;
  }

  friend Wavefunction operator*(cplx s, Wavefunction psi) {
    for (auto& a : psi.amp_) a *= s;
    return psi;
  }
  friend Wavefunction operator*(double s, Wavefunction psi) { return cplx(s, 0.0) * std::move(psi); }

  friend Wavefunction operator+(Wavefunction a, const Wavefunction& b) {
    a.require_same_grid(b);
    for (std::size_t i = 0; i < a.amp_.size(); ++i) a.amp_[i] += b.amp_[i];
    return a;
  }
  friend Wavefunction operator-(Wavefunction a, const Wavefunction& b) {
    a.require_same_grid(b);
    for (std::size_t i = 0; i < a.amp_.size(); ++i) a.amp_[i] -= b.amp_[i];
    return a;
  }

  /// Pointwise multiplication by a real function sampled on the grid.
  Wavefunction multiplied(std::span<const double> f) const {
    Wavefunction out = *this;
    for (std::size_t i = 0; i < amp_.size(); ++i) out.amp_[i] *= f[i];
    return out;
  }

  void require_same_grid(const Wavefunction& other) const {
    if (!(grid_ == other.grid_)) throw GridMismatch();
  }

  friend bool operator==(const Wavefunction&, const Wavefunction&) = default;

 private:
  Grid1D grid_;
  std::vector<cplx> amp_;
};

/// Σ conj(a)·b·dx.
inline cplx inner_product(const Wavefunction& a, const Wavefunction& b) {
  a.require_same_grid(b);
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s * a.grid().dx();
}

/// True when both edge amplitudes are below `tol` relative to the sup norm.
inline bool boundary_decayed(const Wavefunction& psi, double tol = 1e-10) {
  double sup = 0.0;
  for (const auto& a : psi.amplitudes()) sup = std::max(sup, std::abs(a));
  if (sup == 0.0) return true;
  double edge = std::max(std::abs(psi[0]), std::abs(psi[psi.size() - 1]));
  return edge < tol * sup;
}

/// Result of an operator whose accuracy depends on the input being boundary-decayed.
struct OperatorResult {
  Wavefunction psi;
  bool boundary_warning = false;
};

namespace detail {

inline FftPlan& thread_plan(std::size_t n) {
  thread_local std::map<std::size_t, FftPlan> plans;
  auto it = plans.find(n);
  if (it == plans.end()) it = plans.emplace(n, FftPlan(n)).first;
  return it->second;
}

/// Multiplies the spectrum of `data` by `mult[k]` in place.
inline void apply_fourier_multiplier(std::span<cplx> data, std::span<const cplx> mult) {
  auto& plan = thread_plan(data.size());
  auto buf = plan.buffer();
  std::copy(data.begin(), data.end(), buf.begin());
  plan.forward();
  double inv_n = 1.0 / static_cast<double>(data.size());
  for (std::size_t j = 0; j < buf.size(); ++j) buf[j] *= mult[j] * inv_n;
  plan.backward();
  std::copy(buf.begin(), buf.end(), data.begin());
}

}  // namespace detail

/// Fourier differentiation (order 1 or 2). The Nyquist mode is dropped for order 1.
inline OperatorResult spectral_derivative(const Wavefunction& psi, int order) {
  if (order != 1 && order != 2) throw ConfigError("spectral_derivative: order must be 1 or 2");
  const auto k = psi.grid().wavenumbers(order == 1);
  std::vector<cplx> mult(k.size());
  for (std::size_t j = 0; j < k.size(); ++j) mult[j] = order == 1 ? cplx(0.0, k[j]) : cplx(-k[j] * k[j], 0.0);
  Wavefunction out = psi;
  detail::apply_fourier_multiplier(out.amplitudes(), mult);
  return {std::move(out), !boundary_decayed(psi)};
}

/// Spectral derivative of real samples (Nyquist dropped), returned as reals.
inline std::vector<double> spectral_derivative(const Grid1D& grid, std::span<const double> f) {
  Wavefunction w(grid);
  for (std::size_t i = 0; i < f.size(); ++i) w[i] = f[i];
  auto d = spectral_derivative(w, 1).psi;
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = d[i].real();
  return out;
}

/// Shifts amplitudes by round(shift/dx) points. Exactly unitary and exactly invertible.
inline Wavefunction displace(const Wavefunction& psi, double shift) {
  const auto& g = psi.grid();
  if (std::abs(shift) >= g.length() / 4.0) throw ConfigError("displace: |shift| must be below a quarter of the box");
  long s = std::lround(shift / g.dx());
  const auto n = static_cast<long>(g.size());
  std::vector<cplx> out(psi.amplitudes().begin(), psi.amplitudes().end());
  long r = ((s % n) + n) % n;
  std::rotate(out.begin(), out.end() - r, out.end());

  double sup = 0.0;
  for (const auto& a : out) sup = std::max(sup, std::abs(a));
  const long margin = n / 10;
  for (long i = 0; i < n; ++i) {
    if (i >= margin && i < n - margin) continue;
    if (std::abs(out[static_cast<std::size_t>(i)]) > 1e-10 * sup)
      throw NumericalError("displace: shifted support reaches the outer 10% of the box");
  }
  return {g, std::move(out)};
}

/// Shortest round-trip decimal form of a double.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

/// Columnar text: `# grid x_min x_max n`, then one `x re im` row per point.
inline void write_wavefunction(std::ostream& os, const Wavefunction& psi) {
  const auto& g = psi.grid();
  os << "# grid " << format_double(g.x_min()) << ' ' << format_double(g.x_max()) << ' ' << g.size() << '\n';
  for (std::size_t i = 0; i < g.size(); ++i)
    os << format_double(g.x(i)) << ' ' << format_double(psi[i].real()) << ' ' << format_double(psi[i].imag()) << '\n';
}

inline Wavefunction read_wavefunction(std::istream& is) {
  std::string line;
  std::optional<Grid1D> grid;
  std::vector<cplx> amp;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, tag;
      double lo = 0.0, hi = 0.0;
      std::size_t n = 0;
      ls >> hash >> tag;
      if (tag == "grid" && (ls >> lo >> hi >> n)) grid.emplace(lo, hi, n);
      continue;
    }
    double x = 0.0, re = 0.0, im = 0.0;
    if (!(ls >> x >> re >> im)) throw IoError("read_wavefunction: malformed row '" + line + "'");
    amp.emplace_back(re, im);
  }
  if (!grid) throw IoError("read_wavefunction: missing '# grid' header");
  return {*grid, std::move(amp)};
}

}  // namespace susyq
