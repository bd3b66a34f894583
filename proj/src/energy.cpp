#include "ldg/energy.hpp"

#include "ldg/errors.hpp"
#include "ldg/kernels.hpp"

namespace ldg {
namespace {

double plane_factor(const Grid& g) { return g.spec().half_plane ? 2.0 : 1.0; }

void require_xi(double xi) {
  if (!(xi > 0.0)) throw InvalidInput("correlation length must be positive");
}

}  // namespace

EnergyBreakdown total_energy(const FieldArray& field, double xi) {
  require_xi(xi);
  const kernels::RawEnergy raw = kernels::energy(field, xi);
  const double s = plane_factor(*field.grid);
  EnergyBreakdown e;
  e.e_grad = s * raw.grad;
  e.e_phi = s * raw.phi;
  e.e_pot = s * raw.pot;
  e.total = e.e_grad + e.e_phi + e.e_pot;
  return e;
}

std::vector<QComponents> energy_gradient(const FieldArray& field, double xi) {
  require_xi(xi);
  const Grid& g = *field.grid;
  std::vector<QComponents> d;
  kernels::energy_derivative(field, xi, d);
  for (std::size_t p = 0; p < g.size(); ++p)
    if (g.free_mask(p) != 0) d[p] *= 1.0 / g.mass(p);
  return d;
}

double weighted_dot(const FieldArray& like, const std::vector<QComponents>& g, const std::vector<QComponents>& v) {
  return plane_factor(*like.grid) * kernels::mass_dot(*like.grid, g, v);
}

double residual_norm(const FieldArray& like, const std::vector<QComponents>& g) {
  return kernels::max_abs_free(*like.grid, g);
}

}  // namespace ldg
