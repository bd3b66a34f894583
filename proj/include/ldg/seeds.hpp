#pragma once

// Initial conditions and the explicit comparison map of the upper-bound construction.

#include <array>
#include <string>

#include "ldg/energy.hpp"
#include "ldg/grid.hpp"

namespace ldg {

/// Q_inf everywhere, then boundary conditions.
FieldArray constant_seed(GridPtr grid);

enum class PsiConvention {
  literal,  // n = (cos psi, 0, sin psi)
  swapped,  // n = (sin psi, 0, cos psi)
};

PsiConvention parse_psi_convention(const std::string& s);
std::string to_string(PsiConvention c);

/// Hyperbolic-defect ansatz: point defect at (0, -z0), image charge at (0, -1/z0).
struct HyperbolicAnsatz {
  double z0 = 1.3;
  PsiConvention convention = PsiConvention::swapped;
};

/// psi = 2 atan(rho/z) - atan(rho/(z+z0)) - atan(rho/(z+1/z0)), each term taken as
/// the polar angle atan2(rho, .) in [0, pi].
double hyperbolic_psi(double rho, double z, double z0);

/// Cross-section director of the ansatz.
Vec3 hyperbolic_director(double rho, double z, const HyperbolicAnsatz& ansatz);

/// Throws InvalidInput when z0 <= 1 or the grid is in half-plane mode.
FieldArray hyperbolic_seed(GridPtr grid, const HyperbolicAnsatz& ansatz = {});

enum class Region { D1 = 1, D2, D3, D4, D5, D6 };

/// Explicit admissible map on the quarter plane D = {rho, z > 0, rho^2 + z^2 > 1}.
///   D1: |x| > 2, Q_inf.
///   D2: rest outside the disc of radius 1/2 about (1, 0); director phase interpolated
///       along rays from the origin between the inner boundary and |x| = 2.
///   D4: 4 sigma < r < 1/2 about (1, 0); explicit director.
///   D5: outside the disc of radius sigma about (1 + 2 sigma, 0); phase interpolated in s.
///   D6: that disc; half-winding director scaled by min(1, s/xi).
/// Directors lie in the (rho, z) plane: n = (cos phase, 0, sin phase).
class ComparisonMap {
 public:
  /// Requires xi < e^-4 so that xi < sigma < 1/8.
  explicit ComparisonMap(double xi);

  double xi() const { return xi_; }
  double sigma() const { return sigma_; }

  /// Region of a point of D. Throws InvalidInput outside D.
  Region region(double rho, double z) const;

  /// Value of the map at a point of D.
  QComponents value(double rho, double z) const;

  /// Value given by the formula of one region, evaluated at any point of its closure.
  QComponents value_in(Region region, double rho, double z) const;

  /// Value on the whole cross-section: mirror image for z < 0, radial anchoring
  /// inside the unit disc.
  QComponents value_extended(double rho, double z) const;

  // Building blocks, exposed for the quadrature.
  double d2_inner_radius(double alpha) const;
  double d2_inner_phase(double alpha) const;
  double d2_phase(double rho, double z) const;
  double d4_phase(double r, double theta) const;
  double d5_outer_radius(double phi) const;
  double d5_outer_phase(double phi) const;
  double d5_phase(double s, double phi) const;
  /// Polar angle where the D5 outer boundary switches from the r = 4 sigma arc to
  /// the unit circle, and where it crosses theta = pi/2 on that arc.
  double d5_switch_angle() const { return phi_switch_; }
  double d5_kink_angle() const { return phi_kink_; }

 private:
  double xi_;
  double sigma_;
  double phi_switch_ = 0.0;
  double phi_kink_ = 0.0;
};

/// Polar angle (from the rho axis) of the point where the circle of radius 1/2
/// about (1, 0) meets the unit circle, and of its top point (1, 1/2).
double d2_corner_angle();
double d2_kink_angle();

/// Samples the map on the grid and applies boundary conditions.
FieldArray comparison_seed(GridPtr grid, double xi);

struct ComparisonEnergy {
  EnergyBreakdown breakdown;               // over the quarter plane D
  std::array<EnergyBreakdown, 6> by_region{};  // D1..D6
  double remainder = 0.0;                  // total - (pi/2) ln(1/xi) - (pi/2) ln ln(1/xi)
  double error_estimate = 0.0;
};

/// Adaptive Gauss-Kronrod quadrature of the map's energy, region by region in
/// natural coordinates. Throws NumericFailure when the error estimate exceeds 1e-3.
ComparisonEnergy comparison_energy(double xi, double rel_tol = 1e-8);

}  // namespace ldg
