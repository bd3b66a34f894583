#pragma once

// Gradient-flow relaxation dQ/dt = -grad E to critical points.

#include <functional>
#include <string>
#include <vector>

#include "ldg/energy.hpp"
#include "ldg/grid.hpp"

namespace ldg {

enum class Scheme {
  explicit_euler,  // forward Euler on the whole gradient
  imex,            // backward Euler on the quadratic part, forward on the potential
  linearized,      // backward Euler linearized about the current state
};

enum class Preconditioner {
  slot_cholesky,  // per-component sparse Cholesky in a frame following the director
  block_jacobi,   // 5x5 node blocks
};

Scheme parse_scheme(const std::string& s);
std::string to_string(Scheme s);
Preconditioner parse_preconditioner(const std::string& s);
std::string to_string(Preconditioner p);

struct SolveOptions {
  Scheme scheme = Scheme::linearized;
  Preconditioner preconditioner = Preconditioner::slot_cholesky;
  double dt_initial = 0.0;  // 0 picks a scheme-dependent default
  double dt_max = 1e4;
  double dt_growth = 1.5;
  double tol_residual = 1e-7;
  long max_steps = 5000;
  long checkpoint_every = 0;
  double cg_rel_tol = 1e-4;
  int cg_max_iter = 400;
  bool preflight = true;  // require h <= xi/2 near (1, 0)
  std::function<void(const FieldArray&, long step)> on_checkpoint;
  std::function<void(long step, double energy, double residual, double dt, int cg_iters)> on_step;
};

struct SolveReport {
  long steps = 0;
  long rejected = 0;
  long cg_iterations = 0;
  double residual = 0.0;
  double final_dt = 0.0;
  std::vector<double> energy_history;
  double wall_s = 0.0;
  bool converged = false;
};

struct RelaxResult {
  FieldArray field;
  SolveReport report;
};

/// Relax towards a critical point of the energy at correlation length xi.
/// Prescribed components are never modified. Throws SolverFailure when the time
/// step underflows without an energy decrease.
RelaxResult relax(FieldArray field, double xi, const SolveOptions& opts = {});

/// Stability bound used by the explicit scheme.
double explicit_dt_limit(const Grid& grid, double xi);

struct SweepPoint {
  double xi = 0.0;
  FieldArray field;
  SolveReport report;
  EnergyBreakdown energy;
};

/// Relax at each xi of a descending list, warm-starting from the previous result.
/// on_point is called after every successful relaxation. When a relaxation fails,
/// the points computed so far are kept in `partial` before the error propagates.
std::vector<SweepPoint> continuation_sweep(const std::vector<double>& xi_list, const FieldArray& seed, double xi0,
                                           const SolveOptions& opts,
                                           const std::function<void(const SweepPoint&)>& on_point = {},
                                           std::vector<SweepPoint>* partial = nullptr);

}  // namespace ldg
