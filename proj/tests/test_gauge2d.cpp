#include <gtest/gtest.h>

#include <susyq/gauge2d.hpp>
#include <susyq/interferometer.hpp>

using namespace susyq;

namespace {

const Grid2D grid(10.0, 128);

}  // namespace

TEST(Grid2D, RejectsBadSizes) {
  EXPECT_THROW(Grid2D(10.0, 100), ConfigError);
  EXPECT_THROW(Grid2D(-1.0, 64), ConfigError);
  EXPECT_DOUBLE_EQ(grid.dx(), 20.0 / 128);
}

TEST(GaugeConfig, Validation) {
  GaugeConfig c;
  c.B = 0;
  EXPECT_THROW(c.validate(grid), ConfigError);
  c.B = 0.25;  // r0 = 2, so the box needs L >= 16
  EXPECT_THROW(c.validate(grid), ConfigError);
  GaugeConfig v;
  v.V.assign(3, 0.0);
  EXPECT_THROW(v.validate(grid), ConfigError);
}

TEST(Supercharges, AlgebraClosesAtGTwo) {
  auto r = supercharge_residuals(grid, GaugeConfig{}, 6, 11);
  EXPECT_LT(r.r_comm, 1e-6);
  EXPECT_LT(r.r_anti, 1e-6);
  EXPECT_LT(r.r_cross, 1e-6);
}

TEST(Supercharges, DetunedGBreaksSquareRelation) {
  GaugeConfig c;
  c.g = 3.0;
  auto r = supercharge_residuals(grid, c, 6, 11);
  EXPECT_GT(r.r_anti, 1e-3);
}

TEST(Supercharges, ResidualsDoNotDependOnSeedScale) {
  for (std::uint64_t seed : {1u, 2u, 99u}) EXPECT_LT(supercharge_residuals(grid, GaugeConfig{}, 3, seed).r_anti, 1e-6);
}

TEST(Landau, LevelsAndZeroModes) {
  auto s = landau_spectrum(grid, GaugeConfig{}, 4, 2);
  ASSERT_EQ(s.orbital.size(), 4u);
  EXPECT_FALSE(s.boundary_flag);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(s.orbital[k].energy, k + 0.5, 1e-8);
    EXPECT_NEAR(s.up[k].energy, static_cast<double>(k), 1e-8);
    EXPECT_NEAR(s.down[k].energy, k + 1.0, 1e-8);
  }
  // Each level holds one state per bulk k_x block, roughly 2·(0.8L − extent)/Δk·B.
  EXPECT_GT(s.orbital[0].multiplicity, 20u);
  EXPECT_LE(s.orbital[1].multiplicity, s.orbital[0].multiplicity);
  EXPECT_GE(s.orbital[1].multiplicity + 4, s.orbital[0].multiplicity);
}

TEST(Landau, StrongerFieldScalesSpacing) {
  GaugeConfig c;
  c.B = 2.0;
  auto s = landau_spectrum(grid, c, 3);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(s.orbital[k].energy, 2.0 * (k + 0.5), 1e-8);
  EXPECT_NEAR(s.up[0].energy, 0.0, 1e-8);
}

TEST(Landau, GaugeShiftLeavesEnergiesUnchanged) {
  GaugeConfig c;
  c.shift = 0.37;
  auto a = landau_spectrum(grid, GaugeConfig{}, 3), b = landau_spectrum(grid, c, 3);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(a.orbital[k].energy, b.orbital[k].energy, 1e-9);
}

TEST(Landau, WorkerInvariance) {
  auto a = landau_spectrum(grid, GaugeConfig{}, 3, 1), b = landau_spectrum(grid, GaugeConfig{}, 3, 4);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(a.orbital[k].energy, b.orbital[k].energy);
    EXPECT_EQ(a.orbital[k].multiplicity, b.orbital[k].multiplicity);
  }
}

TEST(Landau, RejectsXDependentPotential) {
  GaugeConfig c;
  c.V = harmonic_potential_2d(grid, 0.3);
  EXPECT_THROW(landau_spectrum(grid, c, 3), ConfigError);
}

TEST(Landau, YOnlyPotentialShiftsLevels) {
  GaugeConfig c;
  c.V.assign(grid.size(), 0.25);
  auto s = landau_spectrum(grid, c, 2);
  EXPECT_NEAR(s.orbital[0].energy, 0.75, 1e-8);
}

TEST(Detune, PairingBestAtUnitEta) {
  auto etas = linspace_step(-2, 2, 0.1);
  auto pts = eta_detune_sweep(grid, GaugeConfig{}, etas, 4);
  ASSERT_EQ(pts.size(), etas.size());
  double best = 1e9;
  for (const auto& p : pts) best = std::min(best, p.mismatch);
  for (const auto& p : pts) {
    EXPECT_NEAR(p.mismatch, std::abs(1.0 - std::abs(p.eta)), 1e-8) << p.eta;
    EXPECT_NEAR(p.unshifted, std::abs(p.eta), 1e-12);
    if (std::abs(std::abs(p.eta) - 1.0) < 1e-9) {
      EXPECT_EQ(p.mismatch, best);
    }
  }
  EXPECT_LT(best, 1e-8);
}
