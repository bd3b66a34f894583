#pragma once

#include <vector>

#include "ldg/grid.hpp"

namespace ldg {

/// Energy of the cross-section field. With half_plane set, values are doubled so
/// they refer to the whole cross-section.
struct EnergyBreakdown {
  double e_grad = 0.0;
  double e_phi = 0.0;
  double e_pot = 0.0;
  double total = 0.0;
};

EnergyBreakdown total_energy(const FieldArray& field, double xi);

/// Pointwise gradient of the energy (derivative divided by the node mass);
/// zero on prescribed components.
std::vector<QComponents> energy_gradient(const FieldArray& field, double xi);

/// Inner product for which energy_gradient is the gradient of total_energy:
/// <g, v> = s * sum_p mass_p g_p . v_p over free components, s = 2 in half-plane mode.
double weighted_dot(const FieldArray& like, const std::vector<QComponents>& g, const std::vector<QComponents>& v);

/// Infinity norm over free components.
double residual_norm(const FieldArray& like, const std::vector<QComponents>& g);

}  // namespace ldg
