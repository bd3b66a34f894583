#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ldg/errors.hpp"
#include "ldg/phase.hpp"

using namespace ldg;

namespace {

constexpr double kPi = std::numbers::pi;

PhaseOptions coarse() {
  PhaseOptions o;
  o.cells_per_delta = 4;
  o.h_max = 0.2;
  return o;
}

}  // namespace

TEST(PhaseBoundary, MatchesAnchoringAndFarValue) {
  for (int tau : {1, -1})
    for (double r : {0.01, 0.05, 0.3}) {
      EXPECT_DOUBLE_EQ(phase_boundary(tau, r, 0.0), tau * kPi / 2);
      EXPECT_NEAR(phase_boundary(tau, r, phase_theta0(r)), phase_theta1(r), 1e-14);
    }
  EXPECT_NEAR(phase_theta0(2.0), kPi / 2 + std::asin(0.5), 1e-15);
  EXPECT_NEAR(phase_theta0(std::sqrt(2.0)), 3 * kPi / 4, 1e-14);
}

TEST(PhaseInitialGuess, BoundaryDataHeld) {
  const PhaseField f = phase_initial_guess(0.05, 1, coarse());
  for (std::size_t j = 0; j < f.n_z(); ++j)
    for (std::size_t i = 0; i < f.n_rho(); ++i) {
      const std::size_t p = f.index(i, j);
      const double r = std::hypot(f.rho[i] - 1.0, f.z[j]);
      if (r >= f.r_out) EXPECT_EQ(f.phi[p], kPi / 2);
      if (f.z[j] == 0.0 && f.rho[i] > 1.05) EXPECT_EQ(f.status[p], PhaseField::fixed);
      if (f.rho[i] == 0.0 && f.z[j] > 1.0 && f.z[j] < 3.0) EXPECT_EQ(f.status[p], PhaseField::free_node);
    }
}

TEST(PhaseMinimize, MonotoneAndSolvesEulerLagrange) {
  for (int tau : {1, -1}) {
    const PhaseResult r = phase_minimize(0.05, tau, coarse());
    for (std::size_t k = 1; k < r.energy_history.size(); ++k)
      EXPECT_LE(r.energy_history[k], r.energy_history[k - 1] * (1 + 1e-13));
    EXPECT_LT(r.energy, r.energy_history.front());
    double worst = 0.0;
    for (double v : phase_residual(r.field)) worst = std::max(worst, std::abs(v));
    EXPECT_LE(worst, 1e-5);
    EXPECT_NEAR(r.energy, phase_energy(r.field), 1e-12 * r.energy);
  }
}

TEST(PhaseMinimize, PositiveChargeIsCheaper) {
  const double plus = phase_minimize(0.05, 1, coarse()).energy;
  const double minus = phase_minimize(0.05, -1, coarse()).energy;
  EXPECT_LT(plus - minus, 0.0);
}

TEST(PhaseMinimize, RejectsBadInput) {
  EXPECT_THROW(phase_minimize(0.6, 1), InvalidInput);
  EXPECT_THROW(phase_minimize(0.0, 1), InvalidInput);
  EXPECT_THROW(phase_minimize(0.05, 0), InvalidInput);
  PhaseOptions o;
  o.r_out = 0.4;
  EXPECT_THROW(phase_minimize(0.05, 1, o), InvalidInput);
}
