#pragma once

// Structured (rho, z) grid over the truncated cross-section, node classes,
// boundary data, and field storage.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "ldg/qtensor.hpp"

namespace ldg {

/// Grid geometry. With grading == 1 the grid is uniform with n_rho x n_z nodes.
/// With grading > 1 node counts are derived: spacing h_min inside the focus
/// intervals, growing geometrically by `grading` outside, capped at h_max.
struct GridSpec {
  double rho_max = 8.0;
  double z_max = 8.0;
  int n_rho = 65;
  int n_z = 65;
  double grading = 1.0;
  double h_min = 0.05;
  double h_max = 0.25;
  double rho_focus_lo = 0.9;
  double rho_focus_hi = 1.4;
  double z_focus_lo = -0.2;
  double z_focus_hi = 0.2;
  bool half_plane = true;

  bool graded() const { return grading > 1.0; }
  /// Throws InvalidInput when the spec cannot produce a grid.
  void validate() const;
};

enum class NodeClass : std::uint8_t {
  fluid = 0,
  solid = 1,
  sphere_dirichlet = 2,
  far_dirichlet = 3,
  axis = 4,
  mirror_line = 5,
};

const char* to_string(NodeClass c);

/// 1D node coordinates on [lo, hi] for the given focus interval (clipped to [lo, hi]).
std::vector<double> graded_coordinates(double lo, double hi, double focus_lo, double focus_hi, double h_min,
                                       double h_max, double growth);

class Grid {
 public:
  explicit Grid(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  std::size_t n_rho() const { return rho_.size(); }
  std::size_t n_z() const { return z_.size(); }
  std::size_t size() const { return rho_.size() * z_.size(); }
  std::size_t index(std::size_t i, std::size_t j) const { return j * rho_.size() + i; }

  const std::vector<double>& rho() const { return rho_; }
  const std::vector<double>& z() const { return z_; }
  double rho_at(std::size_t p) const { return rho_[p % rho_.size()]; }
  double z_at(std::size_t p) const { return z_[p / rho_.size()]; }
  NodeClass cls(std::size_t p) const { return cls_[p]; }
  const std::vector<NodeClass>& classes() const { return cls_; }

  /// Dual-cell weights: int rho d(rho) and d(z) over the cell around each node.
  const std::vector<double>& rho_weight() const { return rw_; }
  const std::vector<double>& z_weight() const { return zw_; }
  double mass(std::size_t p) const { return rw_[p % rho_.size()] * zw_[p / rho_.size()]; }

  /// Edge weights for the gradient energy: node p to p+1 (horizontal) and p to
  /// p+n_rho (vertical). Zero for edges touching solid nodes or joining two
  /// sphere nodes, and past the last column/row.
  const std::vector<double>& edge_h() const { return wh_; }
  const std::vector<double>& edge_v() const { return wv_; }

  /// Bit k set when component k of node p is free (not prescribed).
  std::uint8_t free_mask(std::size_t p) const { return free_[p]; }
  /// Node carries the bulk terms (Xi and potential) of the energy.
  bool has_node_terms(std::size_t p) const { return node_terms_[p] != 0; }

  /// Largest spacing of the cells around the equator point (1, 0).
  double spacing_near_equator() const;
  double min_spacing() const;

  /// Index of the grid cell containing x along an axis, or npos when outside.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t cell_rho(double r) const;
  std::size_t cell_z(double z) const;

 private:
  GridSpec spec_;
  std::vector<double> rho_, z_;
  std::vector<double> rw_, zw_;
  std::vector<NodeClass> cls_;
  std::vector<double> wh_, wv_;
  std::vector<std::uint8_t> free_;
  std::vector<std::uint8_t> node_terms_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(const GridSpec& spec);

/// Throws InvalidInput when the grid is too coarse near (1, 0) for correlation length xi.
void check_resolution(const Grid& grid, double xi);

/// Radial anchoring value n (x) n - I/3, n = (rho, 0, z)/|(rho, z)|.
QComponents sphere_boundary_value(double rho, double z);

struct FieldArray {
  GridPtr grid;
  std::vector<QComponents> q;

  FieldArray() = default;
  explicit FieldArray(GridPtr g, const QComponents& fill = {}) : grid(std::move(g)), q(grid->size(), fill) {}

  std::size_t size() const { return q.size(); }
  QComponents& operator[](std::size_t p) { return q[p]; }
  const QComponents& operator[](std::size_t p) const { return q[p]; }
};

/// Overwrite prescribed values: sphere nodes get radial anchoring, far nodes Q_inf,
/// axis nodes keep only a0, mirror nodes keep a0..a2. Solid nodes are untouched.
void apply_boundary_conditions(FieldArray& field);

/// Component vector of the reflection z -> -z (and of the half-turn about e3): a3, a4 flip.
QComponents reflect(const QComponents& q);

/// Value of the field at an arbitrary point of the plane. Points below z = 0 in
/// half-plane mode use the mirror image, points with rho < 0 the axisymmetric
/// image, points inside the unit disc the radial extension, and points outside
/// the rectangle Q_inf. Bilinear inside cells; solid corners use the radial extension.
QComponents sample(const FieldArray& field, double rho, double z);

}  // namespace ldg
