#include <gtest/gtest.h>

#include <cmath>

#include "ldg/energy.hpp"
#include "ldg/errors.hpp"
#include "ldg/seeds.hpp"
#include "ldg/solver.hpp"

using namespace ldg;

namespace {

GridPtr coarse_grid(bool half, double extent = 2.5, double h = 0.1) {
  GridSpec s;
  s.rho_max = extent;
  s.z_max = extent;
  s.n_rho = static_cast<int>(std::lround(extent / h)) + 1;
  s.n_z = (half ? 1 : 2) * static_cast<int>(std::lround(extent / h)) + 1;
  s.half_plane = half;
  return build_grid(s);
}

SolveOptions loose(Scheme scheme, double tol) {
  SolveOptions o;
  o.scheme = scheme;
  o.preflight = false;
  o.tol_residual = tol;
  o.max_steps = 400000;
  return o;
}

}  // namespace

TEST(Relax, ConvergedFieldReturnsImmediately) {
  const double xi = 0.2;
  const auto first = relax(constant_seed(coarse_grid(true)), xi, loose(Scheme::linearized, 1e-8));
  ASSERT_TRUE(first.report.converged);
  const auto again = relax(first.field, xi, loose(Scheme::linearized, 1e-8));
  EXPECT_EQ(again.report.steps, 0);
  EXPECT_TRUE(again.report.converged);
  for (std::size_t p = 0; p < first.field.size(); ++p) EXPECT_EQ(again.field[p], first.field[p]);
}

TEST(Relax, EnergyMonotoneAndDirichletUntouched) {
  const double xi = 0.1;
  const FieldArray seed = constant_seed(coarse_grid(true));
  for (Scheme s : {Scheme::linearized, Scheme::imex}) {
    const auto r = relax(seed, xi, loose(s, 1e-7));
    EXPECT_TRUE(r.report.converged) << to_string(s);
    const auto& h = r.report.energy_history;
    ASSERT_GE(h.size(), 2u);
    for (std::size_t k = 1; k < h.size(); ++k) EXPECT_LE(h[k], h[k - 1] * (1 + 1e-10)) << to_string(s) << " step " << k;
    const Grid& g = *seed.grid;
    for (std::size_t p = 0; p < g.size(); ++p) {
      const std::uint8_t m = g.free_mask(p);
      for (int c = 0; c < 5; ++c)
        if (!(m & (1u << c))) EXPECT_EQ(r.field[p][c], seed[p][c]);
    }
    EXPECT_NEAR(h.back(), total_energy(r.field, xi).total, 1e-12 * h.back());
  }
}

TEST(Relax, SchemesAgreeOnCoarseGrid) {
  const double xi = 1.0 / 30;
  const FieldArray seed = constant_seed(coarse_grid(true, 2.0, 0.1));
  const double e_imex = total_energy(relax(seed, xi, loose(Scheme::imex, 1e-6)).field, xi).total;
  const double e_expl = total_energy(relax(seed, xi, loose(Scheme::explicit_euler, 1e-6)).field, xi).total;
  const double e_lin = total_energy(relax(seed, xi, loose(Scheme::linearized, 1e-6)).field, xi).total;
  EXPECT_NEAR(e_expl, e_imex, 1e-4 * e_imex);
  EXPECT_NEAR(e_lin, e_imex, 1e-4 * e_imex);
}

TEST(Relax, MirrorSymmetryPreserved) {
  const double xi = 0.1;
  const FieldArray seed = constant_seed(coarse_grid(false));
  SolveOptions o = loose(Scheme::linearized, 0.0);
  o.max_steps = 200;
  for (auto pc : {Preconditioner::block_jacobi, Preconditioner::slot_cholesky}) {
    o.preconditioner = pc;
    const auto r = relax(seed, xi, o);
    const Grid& g = *r.field.grid;
    double worst = 0.0;
    for (std::size_t j = 0; j < g.n_z(); ++j)
      for (std::size_t i = 0; i < g.n_rho(); ++i) {
        const QComponents a = r.field[g.index(i, j)];
        const QComponents b = reflect(r.field[g.index(i, g.n_z() - 1 - j)]);
        for (int c = 0; c < 5; ++c) worst = std::max(worst, std::abs(a[c] - b[c]));
      }
    EXPECT_LE(worst, 1e-12) << to_string(pc);
  }
}

TEST(Relax, CheckpointCallbackAndValidation) {
  SolveOptions o = loose(Scheme::linearized, 0.0);
  o.max_steps = 10;
  o.checkpoint_every = 4;
  std::vector<long> seen;
  o.on_checkpoint = [&](const FieldArray&, long step) { seen.push_back(step); };
  relax(constant_seed(coarse_grid(true)), 0.2, o);
  EXPECT_EQ(seen, (std::vector<long>{4, 8}));
  EXPECT_THROW(relax(constant_seed(coarse_grid(true)), 0.0), InvalidInput);
  EXPECT_THROW(relax(constant_seed(coarse_grid(true)), 0.01), InvalidInput);
  EXPECT_THROW(parse_scheme("rk4"), InvalidInput);
  EXPECT_EQ(parse_scheme(to_string(Scheme::imex)), Scheme::imex);
}

TEST(ContinuationSweep, WarmStartFromConvergedSeed) {
  const double xi = 0.2;
  const auto first = relax(constant_seed(coarse_grid(true)), xi, loose(Scheme::linearized, 1e-8));
  const auto pts = continuation_sweep({xi}, first.field, xi, loose(Scheme::linearized, 1e-8));
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].report.steps, 0);

  std::vector<double> got;
  const auto two = continuation_sweep({0.2, 0.15}, constant_seed(coarse_grid(true)), 0.2,
                                      loose(Scheme::linearized, 1e-8), [&](const SweepPoint& p) { got.push_back(p.xi); });
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(got, (std::vector<double>{0.2, 0.15}));
  EXPECT_LT(two[1].energy.total, total_energy(two[0].field, 0.15).total + 1e-12);
  EXPECT_THROW(continuation_sweep({0.1, 0.2}, first.field, 0.2, {}), InvalidInput);
}

TEST(ContinuationSweep, WarmStartNeedsNoMoreSteps) {
  const auto warm = continuation_sweep({0.2, 0.15}, constant_seed(coarse_grid(true)), 0.2, loose(Scheme::linearized, 1e-8));
  const auto cold = relax(constant_seed(coarse_grid(true)), 0.15, loose(Scheme::linearized, 1e-8));
  EXPECT_LE(warm[1].report.steps, cold.report.steps);
}

TEST(Relax, ComparisonSeedIsNotCritical) {
  const double xi = 0.01;
  GridSpec s;
  s.grading = 1.2;
  s.h_min = xi / 2;
  s.h_max = 0.3;
  s.rho_max = 4.0;
  s.z_max = 4.0;
  const FieldArray seed = comparison_seed(build_grid(s), xi);
  SolveOptions o;
  o.max_steps = 5;
  const auto r = relax(seed, xi, o);
  EXPECT_LT(total_energy(r.field, xi).total, total_energy(seed, xi).total);
}
