#include "ldg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "ldg/errors.hpp"

namespace ldg {
namespace {

constexpr std::uint8_t kAllFree = 0x1F;

// Cell sizes covering `length` starting from h0 and growing geometrically,
// rescaled to hit the end exactly.
std::vector<double> outward_steps(double length, double h0, double h_max, double growth) {
  std::vector<double> steps;
  if (length <= 0.0) return steps;
  double h = h0, sum = 0.0;
  while (sum < length * (1.0 - 1e-12)) {
    h = std::min(h * growth, h_max);
    steps.push_back(h);
    sum += h;
  }
  double scale = length / sum;
  if (steps.size() > 1) {
    const double shorter = sum - steps.back();
    const double alt = length / shorter;
    if (std::abs(std::log(alt)) < std::abs(std::log(scale))) {
      steps.pop_back();
      scale = alt;
    }
  }
  for (double& s : steps) s *= scale;
  return steps;
}

std::vector<double> uniform_half(double len, int n) {
  // n nodes on [-len, len] generated from the nonnegative half so the set is exactly symmetric.
  std::vector<double> pos;
  const int m = n / 2;
  if (n % 2 == 1) {
    const double h = len / m;
    for (int k = 0; k <= m; ++k) pos.push_back(k == m ? len : k * h);
  } else {
    const double h = 2.0 * len / (n - 1);
    for (int k = 0; k < m; ++k) pos.push_back(k == m - 1 ? len : (k + 0.5) * h);
  }
  std::vector<double> out;
  for (auto it = pos.rbegin(); it != pos.rend(); ++it)
    if (*it != 0.0) out.push_back(-*it);
  out.insert(out.end(), pos.begin(), pos.end());
  return out;
}

std::vector<double> mirrored(const std::vector<double>& neg_half, const std::vector<double>& pos_half) {
  // Both halves start at 0; neg_half holds magnitudes.
  std::vector<double> out;
  for (auto it = neg_half.rbegin(); it != neg_half.rend(); ++it)
    if (*it != 0.0) out.push_back(-*it);
  out.insert(out.end(), pos_half.begin(), pos_half.end());
  return out;
}

std::vector<double> dual_widths(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = i == 0 ? x[0] : 0.5 * (x[i - 1] + x[i]);
    const double hi = i + 1 == n ? x[n - 1] : 0.5 * (x[i] + x[i + 1]);
    w[i] = hi - lo;
  }
  return w;
}

std::size_t locate(const std::vector<double>& x, double v) {
  if (v < x.front() || v > x.back()) return Grid::npos;
  auto it = std::upper_bound(x.begin(), x.end(), v);
  std::size_t k = static_cast<std::size_t>(it - x.begin());
  if (k == 0) return 0;
  if (k >= x.size()) return x.size() - 2;
  return k - 1;
}

}  // namespace

const char* to_string(NodeClass c) {
  switch (c) {
    case NodeClass::fluid: return "fluid";
    case NodeClass::solid: return "solid";
    case NodeClass::sphere_dirichlet: return "sphere_dirichlet";
    case NodeClass::far_dirichlet: return "far_dirichlet";
    case NodeClass::axis: return "axis";
    case NodeClass::mirror_line: return "mirror_line";
  }
  return "unknown";
}

void GridSpec::validate() const {
  auto fail = [](const std::string& m) { throw InvalidInput("grid: " + m); };
  if (!(rho_max > 1.0) || !(z_max > 1.0)) fail("rho_max and z_max must exceed the particle radius");
  if (!std::isfinite(rho_max) || !std::isfinite(z_max)) fail("non-finite extent");
  if (!graded()) {
    if (!(grading == 1.0)) fail("grading must be 1 (uniform) or greater than 1");
    if (n_rho < 5 || n_z < 5) fail("at least 5 nodes per direction are required");
    if (n_rho > 100000 || n_z > 100000) fail("node count too large");
    return;
  }
  if (grading > 2.0) fail("grading ratio must not exceed 2");
  if (!(h_min > 0.0) || !(h_max >= h_min)) fail("need 0 < h_min <= h_max");
  if (h_max > 0.25 * std::min(rho_max, z_max)) fail("h_max too large for the domain");
  if (!(rho_focus_hi >= rho_focus_lo) || !(z_focus_hi >= z_focus_lo)) fail("focus interval reversed");
  const double n_est = (std::min(rho_focus_hi, rho_max) - std::max(rho_focus_lo, 0.0)) / h_min +
                       (z_focus_hi - z_focus_lo) / h_min;
  if (n_est > 200000) fail("focus intervals too large for h_min");
}

std::vector<double> graded_coordinates(double lo, double hi, double focus_lo, double focus_hi, double h_min,
                                       double h_max, double growth) {
  focus_lo = std::clamp(focus_lo, lo, hi);
  focus_hi = std::clamp(focus_hi, lo, hi);
  std::vector<double> x;
  double h0 = h_min;
  if (focus_hi > focus_lo) {
    const int n = std::max(1, static_cast<int>(std::ceil((focus_hi - focus_lo) / h_min - 1e-9)));
    h0 = (focus_hi - focus_lo) / n;
    for (int k = 0; k <= n; ++k) x.push_back(k == n ? focus_hi : focus_lo + k * h0);
  } else {
    x.push_back(focus_lo);
  }
  const auto left = outward_steps(focus_lo - lo, h0, h_max, growth);
  const auto right = outward_steps(hi - focus_hi, h0, h_max, growth);
  std::vector<double> out;
  double c = focus_lo;
  std::vector<double> lpts;
  for (std::size_t k = 0; k < left.size(); ++k) {
    c -= left[k];
    lpts.push_back(k + 1 == left.size() ? lo : c);
  }
  out.assign(lpts.rbegin(), lpts.rend());
  out.insert(out.end(), x.begin(), x.end());
  c = focus_hi;
  for (std::size_t k = 0; k < right.size(); ++k) {
    c += right[k];
    out.push_back(k + 1 == right.size() ? hi : c);
  }
  return out;
}

Grid::Grid(const GridSpec& spec) : spec_(spec) {
  spec.validate();
  if (!spec.graded()) {
    rho_.resize(spec.n_rho);
    const double h = spec.rho_max / (spec.n_rho - 1);
    for (int i = 0; i < spec.n_rho; ++i) rho_[i] = i + 1 == spec.n_rho ? spec.rho_max : i * h;
    if (spec.half_plane) {
      z_.resize(spec.n_z);
      const double hz = spec.z_max / (spec.n_z - 1);
      for (int j = 0; j < spec.n_z; ++j) z_[j] = j + 1 == spec.n_z ? spec.z_max : j * hz;
    } else {
      z_ = uniform_half(spec.z_max, spec.n_z);
    }
  } else {
    rho_ = graded_coordinates(0.0, spec.rho_max, spec.rho_focus_lo, spec.rho_focus_hi, spec.h_min, spec.h_max,
                              spec.grading);
    auto half = [&](double flo, double fhi) {
      flo = std::max(flo, 0.0);
      if (fhi < flo) flo = fhi = 0.0;
      return graded_coordinates(0.0, spec.z_max, flo, fhi, spec.h_min, spec.h_max, spec.grading);
    };
    const auto pos = half(spec.z_focus_lo, spec.z_focus_hi);
    if (spec.half_plane) {
      z_ = pos;
    } else {
      const auto neg = half(-spec.z_focus_hi, -spec.z_focus_lo);
      z_ = mirrored(neg, pos);
    }
  }

  const std::size_t nr = rho_.size(), nz = z_.size();
  zw_ = dual_widths(z_);
  rw_.resize(nr);
  for (std::size_t i = 0; i < nr; ++i) {
    const double lo = i == 0 ? rho_[0] : 0.5 * (rho_[i - 1] + rho_[i]);
    const double hi = i + 1 == nr ? rho_[nr - 1] : 0.5 * (rho_[i] + rho_[i + 1]);
    rw_[i] = 0.5 * (hi * hi - lo * lo);
  }

  // Classification with precedence far > sphere > solid > axis > mirror > fluid.
  auto inside = [&](std::size_t i, std::size_t j) { return rho_[i] * rho_[i] + z_[j] * z_[j] <= 1.0; };
  cls_.assign(nr * nz, NodeClass::fluid);
  for (std::size_t j = 0; j < nz; ++j)
    for (std::size_t i = 0; i < nr; ++i) {
      const std::size_t p = index(i, j);
      const bool far = i + 1 == nr || j + 1 == nz || (!spec.half_plane && j == 0);
      if (far) {
        cls_[p] = NodeClass::far_dirichlet;
      } else if (inside(i, j)) {
        bool touches = false;
        if (i > 0 && !inside(i - 1, j)) touches = true;
        if (i + 1 < nr && !inside(i + 1, j)) touches = true;
        if (j > 0 && !inside(i, j - 1)) touches = true;
        if (j + 1 < nz && !inside(i, j + 1)) touches = true;
        cls_[p] = touches ? NodeClass::sphere_dirichlet : NodeClass::solid;
      } else if (i == 0) {
        cls_[p] = NodeClass::axis;
      } else if (spec.half_plane && j == 0) {
        cls_[p] = NodeClass::mirror_line;
      }
    }

  // The free region must be a single connected piece.
  std::vector<char> seen(nr * nz, 0);
  std::size_t n_free = 0, start = npos;
  for (std::size_t p = 0; p < cls_.size(); ++p) {
    const auto c = cls_[p];
    if (c == NodeClass::fluid || c == NodeClass::axis || c == NodeClass::mirror_line) {
      ++n_free;
      if (start == npos) start = p;
    }
  }
  if (n_free == 0) throw InvalidInput("grid: no fluid nodes");
  std::deque<std::size_t> queue{start};
  seen[start] = 1;
  std::size_t reached = 0;
  auto is_free = [&](std::size_t p) {
    const auto c = cls_[p];
    return c == NodeClass::fluid || c == NodeClass::axis || c == NodeClass::mirror_line;
  };
  while (!queue.empty()) {
    const std::size_t p = queue.front();
    queue.pop_front();
    ++reached;
    const std::size_t i = p % nr, j = p / nr;
    const std::size_t nb[4] = {i > 0 ? p - 1 : npos, i + 1 < nr ? p + 1 : npos, j > 0 ? p - nr : npos,
                               j + 1 < nz ? p + nr : npos};
    for (std::size_t q : nb)
      if (q != npos && !seen[q] && is_free(q)) {
        seen[q] = 1;
        queue.push_back(q);
      }
  }
  if (reached != n_free) throw InvalidInput("grid: fluid region is not connected");

  free_.assign(nr * nz, 0);
  node_terms_.assign(nr * nz, 0);
  for (std::size_t p = 0; p < cls_.size(); ++p) {
    switch (cls_[p]) {
      case NodeClass::fluid: free_[p] = kAllFree; break;
      case NodeClass::axis: free_[p] = 0x01; break;
      case NodeClass::mirror_line: free_[p] = 0x07; break;
      default: break;
    }
    const auto c = cls_[p];
    node_terms_[p] = c != NodeClass::solid && c != NodeClass::sphere_dirichlet;
  }

  auto edge_ok = [&](std::size_t p, std::size_t q) {
    const auto a = cls_[p], b = cls_[q];
    if (a == NodeClass::solid || b == NodeClass::solid) return false;
    return !(a == NodeClass::sphere_dirichlet && b == NodeClass::sphere_dirichlet);
  };
  wh_.assign(nr * nz, 0.0);
  wv_.assign(nr * nz, 0.0);
  for (std::size_t j = 0; j < nz; ++j)
    for (std::size_t i = 0; i < nr; ++i) {
      const std::size_t p = index(i, j);
      if (i + 1 < nr && edge_ok(p, p + 1)) {
        const double mid = 0.5 * (rho_[i] + rho_[i + 1]);
        wh_[p] = mid * zw_[j] / (rho_[i + 1] - rho_[i]);
      }
      if (j + 1 < nz && edge_ok(p, p + nr)) wv_[p] = rw_[i] / (z_[j + 1] - z_[j]);
    }
}

double Grid::spacing_near_equator() const {
  double h = 0.0;
  for (std::size_t i = 0; i + 1 < rho_.size(); ++i)
    if (rho_[i + 1] >= 1.0 && rho_[i] <= 1.1) h = std::max(h, rho_[i + 1] - rho_[i]);
  for (std::size_t j = 0; j + 1 < z_.size(); ++j)
    if (z_[j + 1] >= -0.05 && z_[j] <= 0.05) h = std::max(h, z_[j + 1] - z_[j]);
  return h;
}

double Grid::min_spacing() const {
  double h = rho_.back();
  for (std::size_t i = 0; i + 1 < rho_.size(); ++i) h = std::min(h, rho_[i + 1] - rho_[i]);
  for (std::size_t j = 0; j + 1 < z_.size(); ++j) h = std::min(h, z_[j + 1] - z_[j]);
  return h;
}

std::size_t Grid::cell_rho(double r) const { return locate(rho_, r); }
std::size_t Grid::cell_z(double z) const { return locate(z_, z); }

GridPtr build_grid(const GridSpec& spec) { return std::make_shared<const Grid>(spec); }

void check_resolution(const Grid& grid, double xi) {
  if (!(xi > 0.0)) throw InvalidInput("correlation length must be positive");
  const double h = grid.spacing_near_equator();
  if (h > 0.5 * xi * (1.0 + 1e-9))
    throw InvalidInput("grid spacing " + std::to_string(h) + " near (1,0) exceeds xi/2 = " + std::to_string(0.5 * xi));
}

QComponents sphere_boundary_value(double rho, double z) {
  if (rho == 0.0 && z == 0.0) throw InvalidInput("sphere_boundary_value: origin has no radial direction");
  return uniaxial({rho, 0.0, z});
}

void apply_boundary_conditions(FieldArray& field) {
  const Grid& g = *field.grid;
  const QComponents qinf = q_infinity();
  for (std::size_t p = 0; p < g.size(); ++p) {
    QComponents& q = field.q[p];
    switch (g.cls(p)) {
      case NodeClass::sphere_dirichlet: q = sphere_boundary_value(g.rho_at(p), g.z_at(p)); break;
      case NodeClass::far_dirichlet: q = qinf; break;
      case NodeClass::axis: q = QComponents{{q[0], 0.0, 0.0, 0.0, 0.0}}; break;
      case NodeClass::mirror_line: q[3] = 0.0, q[4] = 0.0; break;
      default: break;
    }
  }
}

QComponents reflect(const QComponents& q) { return QComponents{{q[0], q[1], q[2], -q[3], -q[4]}}; }

QComponents sample(const FieldArray& field, double rho, double z) {
  const Grid& g = *field.grid;
  bool flip = false;
  if (rho < 0.0) rho = -rho, flip = !flip;
  if (g.spec().half_plane && z < 0.0) z = -z, flip = !flip;
  auto finish = [&](const QComponents& q) { return flip ? reflect(q) : q; };
  if (rho * rho + z * z <= 1.0) {
    if (rho == 0.0 && z == 0.0) return finish(q_infinity());
    return finish(sphere_boundary_value(rho, z));
  }
  const std::size_t i = g.cell_rho(rho), j = g.cell_z(z);
  if (i == Grid::npos || j == Grid::npos) return finish(q_infinity());
  const auto& R = g.rho();
  const auto& Z = g.z();
  const double tx = (rho - R[i]) / (R[i + 1] - R[i]);
  const double ty = (z - Z[j]) / (Z[j + 1] - Z[j]);
  auto corner = [&](std::size_t ii, std::size_t jj) {
    const std::size_t p = g.index(ii, jj);
    if (g.cls(p) == NodeClass::solid)
      return R[ii] == 0.0 && Z[jj] == 0.0 ? q_infinity() : sphere_boundary_value(R[ii], Z[jj]);
    return field.q[p];
  };
  QComponents out = (1 - tx) * (1 - ty) * corner(i, j) + tx * (1 - ty) * corner(i + 1, j) +
                    (1 - tx) * ty * corner(i, j + 1) + tx * ty * corner(i + 1, j + 1);
  return finish(out);
}

}  // namespace ldg
