#include "ldg/seeds.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <numbers>

#include "ldg/errors.hpp"

namespace ldg {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;

Vec3 in_plane(double phase) { return {std::cos(phase), 0.0, std::sin(phase)}; }

// Boundary pieces of D2 along its inner boundary, ordered by polar angle.
enum class D2Piece { arc_lower, arc_upper, sphere };

double theta0(double r) { return kHalfPi + std::asin(0.5 * r); }

double arc_phase(double theta) { return theta <= kHalfPi ? kHalfPi - theta : 2.0 * theta - kPi; }

double d2_inner_radius_piece(double alpha, D2Piece piece) {
  if (piece == D2Piece::sphere) return 1.0;
  const double s = std::sin(alpha);
  return std::cos(alpha) + std::sqrt(std::max(0.0, 0.25 - s * s));
}

double d2_inner_phase_piece(double alpha, D2Piece piece) {
  if (piece == D2Piece::sphere) return alpha;
  const double r = d2_inner_radius_piece(alpha, piece);
  const double theta = std::atan2(r * std::sin(alpha), r * std::cos(alpha) - 1.0);
  return piece == D2Piece::arc_lower ? kHalfPi - theta : 2.0 * theta - kPi;
}

double d2_phase_piece(double R, double alpha, D2Piece piece) {
  const double rin = d2_inner_radius_piece(alpha, piece);
  const double t = std::clamp((R - rin) / (2.0 - rin), 0.0, 1.0);
  return (1.0 - t) * d2_inner_phase_piece(alpha, piece) + t * kHalfPi;
}

D2Piece d2_piece(double alpha) {
  if (alpha >= d2_corner_angle()) return D2Piece::sphere;
  return alpha <= d2_kink_angle() ? D2Piece::arc_lower : D2Piece::arc_upper;
}

using Integrand = std::function<double(double, double)>;

// Iterated adaptive Gauss-Kronrod over {a < u < b, lo(u) < v < hi(u)}.
struct Quad2 {
  double rel_tol;
  double error = 0.0;

  double operator()(const Integrand& f, double a, double b, const std::function<double(double)>& lo,
                    const std::function<double(double)>& hi) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    auto inner = [&](double u) {
      auto g = [&](double v) { return f(u, v); };
      return GK::integrate(g, lo(u), hi(u), 12, rel_tol);
    };
    double err = 0.0;
    const double val = GK::integrate(inner, a, b, 12, rel_tol, &err);
    error += err;
    return val;
  }
};

}  // namespace

FieldArray constant_seed(GridPtr grid) {
  FieldArray field(std::move(grid), q_infinity());
  apply_boundary_conditions(field);
  return field;
}

PsiConvention parse_psi_convention(const std::string& s) {
  if (s == "literal") return PsiConvention::literal;
  if (s == "swapped") return PsiConvention::swapped;
  throw InvalidInput("unknown psi convention '" + s + "'");
}

std::string to_string(PsiConvention c) { return c == PsiConvention::literal ? "literal" : "swapped"; }

double hyperbolic_psi(double rho, double z, double z0) {
  return 2.0 * std::atan2(rho, z) - std::atan2(rho, z + z0) - std::atan2(rho, z + 1.0 / z0);
}

Vec3 hyperbolic_director(double rho, double z, const HyperbolicAnsatz& ansatz) {
  const double psi = hyperbolic_psi(rho, z, ansatz.z0);
  if (ansatz.convention == PsiConvention::literal) return {std::cos(psi), 0.0, std::sin(psi)};
  return {std::sin(psi), 0.0, std::cos(psi)};
}

FieldArray hyperbolic_seed(GridPtr grid, const HyperbolicAnsatz& ansatz) {
  if (!(ansatz.z0 > 1.0)) throw InvalidInput("hyperbolic seed needs z0 > 1");
  if (grid->spec().half_plane) throw InvalidInput("hyperbolic seed is not mirror symmetric; use full-plane mode");
  FieldArray field(grid, q_infinity());
  for (std::size_t p = 0; p < field.size(); ++p)
    field[p] = uniaxial(hyperbolic_director(grid->rho_at(p), grid->z_at(p), ansatz));
  apply_boundary_conditions(field);
  return field;
}

double d2_corner_angle() { return std::atan2(std::sqrt(15.0), 7.0); }
double d2_kink_angle() { return std::atan(0.5); }

ComparisonMap::ComparisonMap(double xi) : xi_(xi) {
  if (!(xi > 0.0) || !(xi < std::exp(-4.0)))
    throw InvalidInput("comparison map needs 0 < xi < e^-4, got " + std::to_string(xi));
  sigma_ = 1.0 / (2.0 * std::log(1.0 / xi));
  const double r = 4.0 * sigma_;
  const double t0 = theta0(r);
  phi_switch_ = std::atan2(r * std::sin(t0), r * std::cos(t0) - 2.0 * sigma_);
  phi_kink_ = std::atan2(r, -2.0 * sigma_);
}

Region ComparisonMap::region(double rho, double z) const {
  const double R2 = rho * rho + z * z;
  if (rho < 0.0 || z < 0.0 || R2 < 1.0 - 1e-12) throw InvalidInput("point outside the quarter domain");
  if (R2 >= 4.0) return Region::D1;
  const double r = std::hypot(rho - 1.0, z);
  if (r >= 0.5) return Region::D2;
  if (r >= 4.0 * sigma_) return Region::D4;
  if (std::hypot(rho - 1.0 - 2.0 * sigma_, z) >= sigma_) return Region::D5;
  return Region::D6;
}

double ComparisonMap::d2_inner_radius(double alpha) const { return d2_inner_radius_piece(alpha, d2_piece(alpha)); }
double ComparisonMap::d2_inner_phase(double alpha) const { return d2_inner_phase_piece(alpha, d2_piece(alpha)); }

double ComparisonMap::d2_phase(double rho, double z) const {
  const double alpha = std::atan2(z, rho);
  return d2_phase_piece(std::hypot(rho, z), alpha, d2_piece(alpha));
}

double ComparisonMap::d4_phase(double, double theta) const { return arc_phase(theta); }

double ComparisonMap::d5_outer_radius(double phi) const {
  const double c = std::cos(phi), s2 = sigma_;
  double sbar = -2.0 * s2 * c + std::sqrt(4.0 * s2 * s2 * c * c + 12.0 * s2 * s2);
  if (c < 0.0) {
    const double b = (1.0 + 2.0 * s2) * c;
    const double disc = b * b - (4.0 * s2 + 4.0 * s2 * s2);
    if (disc >= 0.0) sbar = std::min(sbar, -b - std::sqrt(disc));
  }
  return sbar;
}

double ComparisonMap::d5_outer_phase(double phi) const {
  const double sbar = d5_outer_radius(phi);
  const double x = 1.0 + 2.0 * sigma_ + sbar * std::cos(phi), z = sbar * std::sin(phi);
  if (phi <= phi_switch_) return arc_phase(std::atan2(z, x - 1.0));
  return std::atan2(z, x);
}

double ComparisonMap::d5_phase(double s, double phi) const {
  const double sbar = d5_outer_radius(phi);
  const double w = (s - sigma_) / (sbar - sigma_);
  return 0.5 * (1.0 - w) * (kPi - phi) + w * d5_outer_phase(phi);
}

QComponents ComparisonMap::value_in(Region region, double rho, double z) const {
  switch (region) {
    case Region::D1:
      return q_infinity();
    case Region::D2:
      return uniaxial(in_plane(d2_phase(rho, z)));
    case Region::D3:
    case Region::D4:
      return uniaxial(in_plane(arc_phase(std::atan2(z, rho - 1.0))));
    case Region::D5: {
      const double x = rho - 1.0 - 2.0 * sigma_;
      return uniaxial(in_plane(d5_phase(std::hypot(x, z), std::atan2(z, x))));
    }
    case Region::D6: {
      const double x = rho - 1.0 - 2.0 * sigma_;
      const double s = std::hypot(x, z);
      const double lambda = std::min(1.0, s / xi_);
      if (lambda == 0.0) return {};
      return lambda * uniaxial(in_plane(kHalfPi - 0.5 * std::atan2(z, x)));
    }
  }
  return q_infinity();
}

QComponents ComparisonMap::value(double rho, double z) const { return value_in(region(rho, z), rho, z); }

QComponents ComparisonMap::value_extended(double rho, double z) const {
  bool flip = false;
  if (rho < 0.0) {
    rho = -rho;
    flip = !flip;
  }
  if (z < 0.0) {
    z = -z;
    flip = !flip;
  }
  QComponents q;
  if (rho * rho + z * z < 1.0)
    q = (rho == 0.0 && z == 0.0) ? q_infinity() : sphere_boundary_value(rho, z);
  else
    q = value(rho, z);
  return flip ? reflect(q) : q;
}

FieldArray comparison_seed(GridPtr grid, double xi) {
  const ComparisonMap map(xi);
  FieldArray field(grid, q_infinity());
  for (std::size_t p = 0; p < field.size(); ++p) field[p] = map.value_extended(grid->rho_at(p), grid->z_at(p));
  apply_boundary_conditions(field);
  return field;
}

ComparisonEnergy comparison_energy(double xi, double rel_tol) {
  const ComparisonMap map(xi);
  const double sigma = map.sigma();
  const double ixi2 = 1.0 / (xi * xi);
  Quad2 quad{rel_tol};
  ComparisonEnergy out;

  // Energy densities (times the cylindrical weight rho) for an in-plane uniaxial
  // field with phase gradient squared g2 and amplitude lambda.
  auto xi_over_rho = [](double phase, double rho) { return xi_penalty(uniaxial(in_plane(phase))) / rho; };

  auto accumulate = [&](int idx, double g, double p, double v) {
    auto& r = out.by_region[idx];
    r.e_grad += g;
    r.e_phi += p;
    r.e_pot += v;
    r.total += g + p + v;
    out.breakdown.e_grad += g;
    out.breakdown.e_phi += p;
    out.breakdown.e_pot += v;
  };

  // D2 in polar coordinates (R, alpha) about the origin; f = 0.
  {
    const double cuts[] = {0.0, d2_kink_angle(), d2_corner_angle(), kHalfPi};
    const D2Piece pieces[] = {D2Piece::arc_lower, D2Piece::arc_upper, D2Piece::sphere};
    double g = 0.0, p = 0.0;
    for (int k = 0; k < 3; ++k) {
      const D2Piece piece = pieces[k];
      auto lo = [&](double a) { return d2_inner_radius_piece(a, piece); };
      auto hi = [](double) { return 2.0; };
      auto grad = [&](double a, double R) {
        const double h = 1e-7;
        const double pr = (d2_phase_piece(R + h, a, piece) - d2_phase_piece(R - h, a, piece)) / (2 * h);
        const double pa = (d2_phase_piece(R, a + h, piece) - d2_phase_piece(R, a - h, piece)) / (2 * h);
        return 2.0 * (pr * pr + pa * pa / (R * R)) * R * std::cos(a) * R;
      };
      auto phi = [&](double a, double R) {
        const double rho = R * std::cos(a);
        if (rho <= 0.0) return 0.0;
        return xi_over_rho(d2_phase_piece(R, a, piece), rho) * R;
      };
      g += quad(grad, cuts[k], cuts[k + 1], lo, hi);
      p += quad(phi, cuts[k], cuts[k + 1], lo, hi);
    }
    accumulate(1, g, p, 0.0);
  }

  // D4 in polar coordinates about (1, 0) with r = e^u; f = 0.
  {
    const double u0 = std::log(4.0 * sigma), u1 = std::log(0.5);
    // |d phase / d theta| is 1 below pi/2 and 2 above.
    auto grad = [&](double u, double t) {
      const double r = std::exp(u);
      const double pt = t <= kHalfPi ? 1.0 : 2.0;
      return 2.0 * pt * pt * (1.0 + r * std::cos(t));
    };
    auto phi = [&](double u, double t) {
      const double r = std::exp(u);
      const double rho = 1.0 + r * std::cos(t);
      return xi_over_rho(arc_phase(t), rho) * r * r;
    };
    auto zero = [](double) { return 0.0; };
    auto mid = [](double) { return kHalfPi; };
    auto top = [](double u) { return theta0(std::exp(u)); };
    const double g = quad(grad, u0, u1, zero, mid) + quad(grad, u0, u1, mid, top);
    const double p = quad(phi, u0, u1, zero, mid) + quad(phi, u0, u1, mid, top);
    accumulate(3, g, p, 0.0);
  }

  // D5 in polar coordinates (s, phi) about (1 + 2 sigma, 0); f = 0.
  {
    const double cuts[] = {0.0, map.d5_kink_angle(), map.d5_switch_angle(), kPi};
    double g = 0.0, p = 0.0;
    const double c = 1.0 + 2.0 * sigma;
    for (int k = 0; k < 3; ++k) {
      // Boundary branch of this piece, extended smoothly past its ends.
      const bool upper = k >= 1, on_sphere = k == 2;
      auto outer_radius = [&](double ph) {
        const double cs = std::cos(ph);
        if (!on_sphere) return -2.0 * sigma * cs + std::sqrt(4.0 * sigma * sigma * cs * cs + 12.0 * sigma * sigma);
        const double bb = c * cs;
        return -bb - std::sqrt(std::max(0.0, bb * bb - (4.0 * sigma + 4.0 * sigma * sigma)));
      };
      auto outer_phase = [&](double ph) {
        const double sb = outer_radius(ph);
        const double x = c + sb * std::cos(ph), z = sb * std::sin(ph);
        if (on_sphere) return std::atan2(z, x);
        const double t = std::atan2(z, x - 1.0);
        return upper ? 2.0 * t - kPi : kHalfPi - t;
      };
      auto phase = [&](double s, double ph) {
        const double sb = outer_radius(ph);
        const double w = (s - sigma) / (sb - sigma);
        return 0.5 * (1.0 - w) * (kPi - ph) + w * outer_phase(ph);
      };
      auto lo = [&](double) { return sigma; };
      auto grad = [&](double ph, double s) {
        const double h = 1e-7 * sigma;
        const double ps = (phase(s + h, ph) - phase(s - h, ph)) / (2 * h);
        const double pp = (phase(s, ph + 1e-7) - phase(s, ph - 1e-7)) / 2e-7;
        return 2.0 * (ps * ps + pp * pp / (s * s)) * (c + s * std::cos(ph)) * s;
      };
      auto phi = [&](double ph, double s) {
        const double rho = c + s * std::cos(ph);
        return xi_over_rho(phase(s, ph), rho) * s;
      };
      g += quad(grad, cuts[k], cuts[k + 1], lo, outer_radius);
      p += quad(phi, cuts[k], cuts[k + 1], lo, outer_radius);
    }
    accumulate(4, g, p, 0.0);
  }

  // D6 in polar coordinates (s, phi) about (1 + 2 sigma, 0); director phase pi/2 - phi/2.
  {
    const double c = 1.0 + 2.0 * sigma;
    double g = 0.0, p = 0.0, v = 0.0;
    const double bands[][2] = {{0.0, xi}, {xi, sigma}};
    for (const auto& band : bands) {
      const double s_lo = band[0], s_hi = band[1];
      auto lo = [&](double) { return s_lo; };
      auto hi = [&](double) { return s_hi; };
      auto lambda = [&](double s) { return std::min(1.0, s / xi); };
      auto grad = [&](double ph, double s) {
        const double l = lambda(s);
        const double dl = s < xi ? 1.0 / xi : 0.0;
        const double dens = dl * dl * (2.0 / 3.0) + l * l * 0.5 / (s * s);
        return dens * (c + s * std::cos(ph)) * s;
      };
      auto phi = [&](double ph, double s) {
        const double l = lambda(s);
        return l * l * xi_over_rho(kHalfPi - 0.5 * ph, c + s * std::cos(ph)) * s;
      };
      auto pot = [&](double ph, double s) {
        const double l = lambda(s);
        if (l >= 1.0) return 0.0;
        const QComponents q = l * uniaxial(in_plane(kHalfPi - 0.5 * ph));
        return ixi2 * potential(q) * (c + s * std::cos(ph)) * s;
      };
      g += quad(grad, 0.0, kPi, lo, hi);
      p += quad(phi, 0.0, kPi, lo, hi);
      v += quad(pot, 0.0, kPi, lo, hi);
    }
    accumulate(5, g, p, v);
  }

  out.breakdown.total = out.breakdown.e_grad + out.breakdown.e_phi + out.breakdown.e_pot;
  out.error_estimate = quad.error;
  const double L = std::log(1.0 / xi);
  out.remainder = out.breakdown.total - kHalfPi * L - kHalfPi * std::log(L);
  if (!(out.error_estimate <= 1e-3) || !std::isfinite(out.breakdown.total))
    throw NumericFailure("comparison energy quadrature did not converge (error estimate " +
                         std::to_string(out.error_estimate) + ")");
  return out;
}

}  // namespace ldg
