#pragma once

#include <complex>
#include <random>

#include <susyq/grid.hpp>

namespace support {

/// Seeded generator for property tests; each test owns its stream.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  /// Gaussian packet with random center, width and momentum, well inside the box.
  susyq::Wavefunction packet(const susyq::Grid1D& g) {
    double c = uniform(-0.15, 0.15) * g.length() + 0.5 * (g.x_min() + g.x_max());
    double w = uniform(0.6, 1.4);
    double k = uniform(-2.0, 2.0);
    return susyq::Wavefunction::from_function(g, [=](double x) {
      double u = (x - c) / w;
      return std::exp(-0.5 * u * u) * std::polar(1.0, k * x);
    });
  }
};

inline double max_abs_diff(const susyq::Wavefunction& a, const susyq::Wavefunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace support
