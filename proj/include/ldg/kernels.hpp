#pragma once

// Low-level energy and gradient kernels on the computational grid. Sums are
// over the grid as stored (no half-plane doubling). Each kernel comes as an
// OpenMP version and a plain serial reference used to check it.
//
// The OpenMP versions accumulate one partial per grid row and combine rows by
// pairwise summation, so results do not depend on the thread count.

#include <vector>

#include "ldg/grid.hpp"

namespace ldg::kernels {

struct RawEnergy {
  double grad = 0.0;
  double phi = 0.0;
  double pot = 0.0;  // already multiplied by 1/xi^2
};

RawEnergy energy(const FieldArray& field, double xi);
RawEnergy energy_serial(const FieldArray& field, double xi);

/// Partial derivatives of the raw energy with respect to every free component;
/// prescribed components are set to zero.
void energy_derivative(const FieldArray& field, double xi, std::vector<QComponents>& out);
void energy_derivative_serial(const FieldArray& field, double xi, std::vector<QComponents>& out);

/// out = K v with K the Hessian of the quadratic (gradient plus Xi) part, restricted
/// to free components.
void apply_stiffness(const Grid& grid, const std::vector<QComponents>& v, std::vector<QComponents>& out);

/// Pairwise (cascade) summation of a vector of partials.
double pairwise_sum(const double* x, std::size_t n);

/// Sum over nodes of mass * <a, b> restricted to free components (row partials, pairwise).
double mass_dot(const Grid& grid, const std::vector<QComponents>& a, const std::vector<QComponents>& b);

/// Largest |a_k| over free components.
double max_abs_free(const Grid& grid, const std::vector<QComponents>& a);

}  // namespace ldg::kernels
