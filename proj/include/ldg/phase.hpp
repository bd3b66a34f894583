#pragma once

// Scalar phase problem outside a small disc around the ring position (1, 0):
// minimise F(phi) = int (|grad phi|^2 + cos^2(phi) / rho^2) rho drho dz for the
// in-plane director n = (cos phi, 0, sin phi).

#include <cstdint>
#include <vector>

namespace ldg {

struct PhaseOptions {
  double r_out = 4.0;       // outer truncation radius about (1, 0)
  int cells_per_delta = 8;  // h_min = delta / cells_per_delta near the inner circle
  double h_max = 0.1;
  double growth = 1.1;
  double tol = 1e-9;        // infinity norm of the discrete Euler-Lagrange residual
  int max_iter = 200;
};

/// Phase field on a masked structured grid of the quarter plane.
struct PhaseField {
  enum Node : std::uint8_t { free_node = 0, fixed = 1 };

  double delta = 0.0;
  int tau = 1;
  double r_out = 0.0;
  std::vector<double> rho, z;
  std::vector<std::uint8_t> status;
  std::vector<double> phi;

  std::size_t n_rho() const { return rho.size(); }
  std::size_t n_z() const { return z.size(); }
  std::size_t index(std::size_t i, std::size_t j) const { return j * rho.size() + i; }
};

/// Boundary phase tau*pi/2 - lambda(r) theta on the inner circle, polar (r, theta) about (1, 0).
double phase_boundary(int tau, double r, double theta);

/// theta0(r) = pi/2 + asin(r/2) and theta1 = 2 theta0 - pi for r <= sqrt 2.
double phase_theta0(double r);
double phase_theta1(double r);

struct PhaseResult {
  PhaseField field;
  double energy = 0.0;
  double residual = 0.0;  // max |discrete Euler-Lagrange residual| over free nodes
  int iterations = 0;
  std::vector<double> energy_history;  // initial guess, then each Newton iterate
};

/// Phase field with the boundary data set and free nodes initialised by the
/// harmonic extension of that data.
PhaseField phase_initial_guess(double delta, int tau, const PhaseOptions& opts = {});

/// Discrete F of a phase field.
double phase_energy(const PhaseField& field);

/// Discrete residual of Delta phi + rho^-1 d_rho phi + sin(2 phi) / (2 rho^2) at free nodes.
std::vector<double> phase_residual(const PhaseField& field);

/// Newton iteration with backtracking from the harmonic initial guess.
/// Throws InvalidInput unless 0 < delta < 1/2 < r_out and tau = +-1,
/// SolverFailure when the iteration does not converge.
PhaseResult phase_minimize(double delta, int tau, const PhaseOptions& opts = {});

}  // namespace ldg
