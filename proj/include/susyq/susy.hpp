#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "grid.hpp"

namespace susyq {

using PotentialFn = std::function<double(double)>;

/// W(x) = x + A exp(-x²/(4σ²)): harmonic confinement plus the barrier-generating Gaussian.
struct HarmonicGaussian {
  double A = 0.0;
  double sigma = 0.5;
  friend bool operator==(const HarmonicGaussian&, const HarmonicGaussian&) = default;
};

/// W(x) = c xⁿ.
struct Monomial {
  double c = 1.0;
  int n = 1;
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// W(x) = √2 (x²/x1² + c tanh(x/x2)). Both asymptotes are +∞, so SUSY is broken.
struct TanhQuadratic {
  double x1 = 2.0;
  double x2 = 0.5;
  double c = 2.0;
  friend bool operator==(const TanhQuadratic&, const TanhQuadratic&) = default;
};

/// Samples of W on a grid. W is interpolated with 4-point cubics; W' comes from spectral
/// differentiation of the samples after removing the straight line through the endpoints.
struct Tabulated {
  Grid1D grid;
  std::vector<double> w;
  friend bool operator==(const Tabulated&, const Tabulated&) = default;
};

/// Signs of W(x → +∞) and W(x → −∞).
struct Asymptotics {
  int at_plus = 0;
  int at_minus = 0;
};

/// broken ⟺ witten_index == 0.
struct SusyClass {
  bool broken = false;
  int witten_index = 0;
  friend bool operator==(const SusyClass&, const SusyClass&) = default;
};

class Superpotential {
 public:
  using Kind = std::variant<HarmonicGaussian, Monomial, TanhQuadratic, Tabulated>;

  Superpotential(Kind kind) : kind_(std::move(kind)) {  // NOLINT(google-explicit-constructor)
    std::visit([this](const auto& k) { validate(k); }, kind_);
  }

  const Kind& kind() const { return kind_; }

  double value(double x) const {
    return std::visit(
        [&](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, HarmonicGaussian>) {
            return x + k.A * std::exp(-x * x / (4.0 * k.sigma * k.sigma));
          } else if constexpr (std::is_same_v<T, Monomial>) {
            return k.c * std::pow(x, k.n);
          } else if constexpr (std::is_same_v<T, TanhQuadratic>) {
            return std::numbers::sqrt2 * (x * x / (k.x1 * k.x1) + k.c * std::tanh(x / k.x2));
          } else {
            return interpolate(k.grid, k.w, x);
          }
        },
        kind_);
  }

  double derivative(double x) const {
    return std::visit(
        [&](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, HarmonicGaussian>) {
            double s2 = k.sigma * k.sigma;
            return 1.0 - k.A * x / (2.0 * s2) * std::exp(-x * x / (4.0 * s2));
          } else if constexpr (std::is_same_v<T, Monomial>) {
            return k.n == 0 ? 0.0 : k.c * k.n * std::pow(x, k.n - 1);
          } else if constexpr (std::is_same_v<T, TanhQuadratic>) {
            double sech = 1.0 / std::cosh(x / k.x2);
            return std::numbers::sqrt2 * (2.0 * x / (k.x1 * k.x1) + k.c / k.x2 * sech * sech);
          } else {
            return interpolate(k.grid, tab_derivative_, x);
          }
        },
        kind_);
  }

  /// Ω(x) = ∫W when a closed form exists (any additive constant).
  std::optional<double> antiderivative(double x) const {
    return std::visit(
        [&](const auto& k) -> std::optional<double> {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, HarmonicGaussian>) {
            return x * x / 2.0 + k.A * k.sigma * std::sqrt(std::numbers::pi) * std::erf(x / (2.0 * k.sigma));
          } else if constexpr (std::is_same_v<T, Monomial>) {
            return k.c * std::pow(x, k.n + 1) / (k.n + 1);
          } else if constexpr (std::is_same_v<T, TanhQuadratic>) {
            double u = std::abs(x / k.x2);
            double log_cosh = u + std::log1p(std::exp(-2.0 * u)) - std::numbers::ln2;
            return std::numbers::sqrt2 * (x * x * x / (3.0 * k.x1 * k.x1) + k.c * k.x2 * log_cosh);
          } else {
            return std::nullopt;
          }
        },
        kind_);
  }

  Asymptotics asymptotics() const {
    return std::visit(
        [&](const auto& k) -> Asymptotics {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, HarmonicGaussian>) {
            return {+1, -1};
          } else if constexpr (std::is_same_v<T, Monomial>) {
            int s = k.c > 0 ? 1 : -1;
            return {s, k.n % 2 == 0 ? s : -s};
          } else if constexpr (std::is_same_v<T, TanhQuadratic>) {
            return {+1, +1};
          } else {
            return {sign(k.w.back()), sign(k.w.front())};
          }
        },
        kind_);
  }

  SusyClass classify() const {
    auto a = asymptotics();
    bool broken = a.at_plus == a.at_minus;
    return {broken, broken ? 0 : 1};
  }

  std::vector<double> values(const Grid1D& g) const {
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = value(g.x(i));
    return out;
  }

  std::vector<double> derivatives(const Grid1D& g) const {
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = derivative(g.x(i));
    return out;
  }

  std::string describe() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, HarmonicGaussian>) {
            return "harmonic_gaussian(A=" + format_double(k.A) + ",sigma=" + format_double(k.sigma) + ")";
          } else if constexpr (std::is_same_v<T, Monomial>) {
            return "monomial(c=" + format_double(k.c) + ",n=" + std::to_string(k.n) + ")";
          } else if constexpr (std::is_same_v<T, TanhQuadratic>) {
            return "tanh_quadratic(x1=" + format_double(k.x1) + ",x2=" + format_double(k.x2) +
                   ",c=" + format_double(k.c) + ")";
          } else {
            return "tabulated(n=" + std::to_string(k.w.size()) + ")";
          }
        },
        kind_);
  }

  friend bool operator==(const Superpotential& a, const Superpotential& b) { return a.kind_ == b.kind_; }

 private:
  static int sign(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

  void validate(const HarmonicGaussian& k) const {
    if (!(k.sigma > 0)) throw ConfigError("harmonic_gaussian: sigma must be positive");
  }
  void validate(const Monomial& k) const {
    if (k.n < 1) throw ConfigError("monomial: n must be a positive integer");
    if (k.c == 0.0) throw ConfigError("monomial: c must be nonzero");
  }
  void validate(const TanhQuadratic& k) const {
    if (!(k.x1 > 0) || !(k.x2 > 0)) throw ConfigError("tanh_quadratic: x1 and x2 must be positive");
  }
  void validate(const Tabulated& k) {
    if (k.w.size() != k.grid.size()) throw ConfigError("tabulated: sample count does not match grid");
    for (double v : k.w)
      if (!std::isfinite(v)) throw ConfigError("tabulated: samples must be finite");
    // Detrend so the periodic extension is continuous before differentiating.
    const auto n = k.w.size();
    double slope = (k.w.back() - k.w.front()) / (k.grid.x(n - 1) - k.grid.x(0));
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = k.w[i] - k.w.front() - slope * (k.grid.x(i) - k.grid.x(0));
    tab_derivative_ = spectral_derivative(k.grid, r);
    for (auto& d : tab_derivative_) d += slope;
  }

  // 4-point Lagrange interpolation, clamped to the tabulated range.
  static double interpolate(const Grid1D& g, const std::vector<double>& f, double x) {
    const auto n = static_cast<long>(f.size());
    double u = (x - g.x_min()) / g.dx();
    if (u <= 0) return f.front();
    if (u >= static_cast<double>(n - 1)) return f.back();
    long i = static_cast<long>(std::floor(u));
    double t = u - static_cast<double>(i);
    if (t == 0.0) return f[static_cast<std::size_t>(i)];
    long i0 = std::clamp(i - 1, 0L, n - 4);
    double s = u - static_cast<double>(i0);
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
      double w = 1.0;
      for (int b = 0; b < 4; ++b)
        if (b != a) w *= (s - b) / static_cast<double>(a - b);
      acc += w * f[static_cast<std::size_t>(i0 + a)];
    }
    return acc;
  }

  Kind kind_;
  std::vector<double> tab_derivative_;
};

/// Kinetic conventions. `oscillator`: hbar = m = 1, H = -∂²/2 + W²/2 ± W'/2.
/// `unit_kinetic`: hbar²/(2m) = 1, H = -∂² + W² ± W' (used for the box example).
enum class Units { oscillator, unit_kinetic };

inline double kinetic_prefactor(Units u) { return u == Units::oscillator ? 0.5 : 1.0; }

/// V1 pairs with H1 = B B†, V2 with H2 = B† B. V1 − V2 = W' (times 2 in unit_kinetic).
struct PotentialPair {
  std::vector<double> v1;
  std::vector<double> v2;
  std::optional<Superpotential> source;
  Units units = Units::oscillator;
  PotentialFn v1_fn;
  PotentialFn v2_fn;
  std::string id;
};

inline PotentialPair partner_potentials(const Superpotential& w, const Grid1D& grid, Units units = Units::oscillator) {
  double scale = units == Units::oscillator ? 0.5 : 1.0;
  auto make = [w, scale](double sign) {
    return [w, scale, sign](double x) {
      double v = w.value(x);
      return scale * (v * v + sign * w.derivative(x));
    };
  };
  PotentialPair p;
  p.v1_fn = make(+1.0);
  p.v2_fn = make(-1.0);
  p.v1.resize(grid.size());
  p.v2.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    p.v1[i] = p.v1_fn(grid.x(i));
    p.v2[i] = p.v2_fn(grid.x(i));
  }
  p.source = w;
  p.units = units;
  p.id = w.describe();
  return p;
}

/// (W ψ − ψ')/√2.
inline OperatorResult apply_B_dagger(const Superpotential& w, const Wavefunction& psi) {
  auto d = spectral_derivative(psi, 1);
  auto wv = w.values(psi.grid());
  Wavefunction out = psi.multiplied(wv) - d.psi;
  return {(1.0 / std::numbers::sqrt2) * std::move(out), d.boundary_warning};
}

/// (W ψ + ψ')/√2.
inline OperatorResult apply_B(const Superpotential& w, const Wavefunction& psi) {
  auto d = spectral_derivative(psi, 1);
  auto wv = w.values(psi.grid());
  Wavefunction out = psi.multiplied(wv) + d.psi;
  return {(1.0 / std::numbers::sqrt2) * std::move(out), d.boundary_warning};
}

/// Which partner Hamiltonian owns the zero mode.
enum class Partner { h1, h2 };

struct ZeroMode {
  Wavefunction psi;
  /// -1: ψ ∝ exp(−Ω), annihilated by B (lives in H2). +1: ψ ∝ exp(+Ω), annihilated by B† (lives in H1).
  int exponent_sign = -1;
  Partner owner = Partner::h2;
};

namespace detail {

/// Ω on the grid, from the closed form when available, else by Euler–Maclaurin corrected
/// cumulative trapezoid of W (fourth order).
inline std::vector<double> antiderivative_on(const Superpotential& w, const Grid1D& g) {
  std::vector<double> omega(g.size());
  if (w.antiderivative(0.0)) {
    for (std::size_t i = 0; i < g.size(); ++i) omega[i] = *w.antiderivative(g.x(i));
    return omega;
  }
  const double h = g.dx();
  omega[0] = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i) {
    double a = g.x(i - 1), b = g.x(i);
    omega[i] = omega[i - 1] + 0.5 * h * (w.value(a) + w.value(b)) - h * h / 12.0 * (w.derivative(b) - w.derivative(a));
  }
  return omega;
}

}  // namespace detail

/// Normalizable zero-energy state built from exp(∓Ω), or nullopt when SUSY is broken.
inline std::optional<ZeroMode> zero_mode(const Superpotential& w, const Grid1D& grid) {
  auto asym = w.asymptotics();
  if (asym.at_plus == asym.at_minus) return std::nullopt;
  // W(+∞) > 0 makes exp(−Ω) decay on both sides; the opposite orientation needs exp(+Ω).
  int sign = asym.at_plus > 0 ? -1 : +1;
  auto omega = detail::antiderivative_on(w, grid);
  double ref = sign < 0 ? *std::min_element(omega.begin(), omega.end()) : *std::max_element(omega.begin(), omega.end());
  Wavefunction psi(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) psi[i] = std::exp(sign * (omega[i] - ref));
  if (!boundary_decayed(psi, 1e-8))
    throw NumericalError("zero_mode: exp(" + std::string(sign < 0 ? "-" : "+") +
                         "Ω) does not decay inside the grid for " + w.describe());
  return ZeroMode{psi.normalized(), sign, sign < 0 ? Partner::h2 : Partner::h1};
}

/// V_η(x) = x²/2 + (A²/2) g² + A x g (1 + (2η−1)/(4σ²)), g = exp(−x²/(4σ²)).
/// At σ = 1/2 this is x²/2 + (A²/2)e^{−2x²} + 2ηA x e^{−x²}; V_0 = V1 − 1/2 and V_1 = V2 + 1/2.
inline PotentialFn eta_potential_fn(double eta, double A, double sigma = 0.5) {
  return [=](double x) {
    double g = std::exp(-x * x / (4.0 * sigma * sigma));
    return 0.5 * x * x + 0.5 * A * A * g * g + A * x * g * (1.0 + (2.0 * eta - 1.0) / (4.0 * sigma * sigma));
  };
}

inline std::vector<double> eta_potential(double eta, double A, const Grid1D& grid, double sigma = 0.5) {
  auto f = eta_potential_fn(eta, A, sigma);
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid.x(i));
  return v;
}

}  // namespace susyq
