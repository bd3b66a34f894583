#pragma once

// Defect diagnostics: bad set, ball covers, orientability of loops, ring charge,
// cluster localisation and loop energy profiles.

#include <array>
#include <cstddef>
#include <vector>

#include "ldg/grid.hpp"

namespace ldg {

using Point2 = std::array<double, 2>;  // (rho, z)

struct Ball {
  Point2 center{};
  double radius = 0.0;
};

enum class Orientability { orientable, nonorientable, unknown };
enum class DefectKind { ring, axis_point };

const char* to_string(Orientability o);
const char* to_string(DefectKind k);

struct DefectCluster {
  Point2 center{};
  double radius = 0.0;
  double mass = 0.0;  // xi^-2 * integral of f over the cluster nodes (rho-weighted), doubled in half-plane mode
  std::size_t n_nodes = 0;
  Orientability orientability = Orientability::unknown;
  DefectKind kind = DefectKind::ring;
};

/// Nodes carrying bulk terms with f(Q) > eta. Throws InvalidInput for eta <= 0.
std::vector<std::size_t> bad_set(const FieldArray& field, double eta);

/// Disjoint closed balls covering radius-r0 balls around the points: intersecting
/// balls are repeatedly replaced by the smallest ball containing both.
std::vector<Ball> merge_balls(const std::vector<Point2>& points, double r0);

struct LoopOptions {
  int samples = 64;
  int max_samples = 4096;
  double eta = 0.05;         // loop points must satisfy f < 2 eta
  double dot_gate = 0.5;     // consecutive lifted directors must have |n . n'| above this
};

/// Whether the director along the circle lifts to a continuous unit vector field.
/// Throws BadLoop when a sample has no well-defined director or lies in the bad
/// set, ResolutionError when refinement reaches max_samples.
Orientability loop_orientability(const FieldArray& field, const Point2& center, double radius,
                                 const LoopOptions& opts = {});

/// Sign of the ring charge from the in-plane phase along the circle of radius
/// delta about (1, 0), transported from the anchored value on the sphere down to
/// the equatorial plane. Throws NotApplicable when the field is not in-plane there,
/// ResolutionError when the phase jumps by more than pi/4 between samples.
int ring_charge(const FieldArray& field, double delta, int samples = 256, double in_plane_tol = 0.1);

struct LocateOptions {
  double eta = 0.05;
  double r0 = 0.0;              // 0 picks 2 * (local grid spacing)
  double axis_threshold = 0.2;
  LoopOptions loop;
};

/// Bad set, 8-connected components, one ball per component, merged, then an
/// orientability test on a circle of twice the ball radius.
std::vector<DefectCluster> locate_defects(const FieldArray& field, double xi, const LocateOptions& opts = {});

struct LoopEnergySample {
  double radius = 0.0;
  double scaled = 0.0;  // r * integral over the circle of |d Q / d s|^2 ds
};

/// Tangential Dirichlet energy of the field along circles about a center.
std::vector<LoopEnergySample> loop_energy_profile(const FieldArray& field, const Point2& center,
                                                  const std::vector<double>& radii, int samples = 2048);

}  // namespace ldg
