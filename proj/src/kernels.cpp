#include "ldg/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace ldg::kernels {
namespace {

inline double sq_diff(const QComponents& a, const QComponents& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < kComponents; ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

inline QComponents masked(const QComponents& q, std::uint8_t mask) {
  QComponents out;
  for (std::size_t k = 0; k < kComponents; ++k) out[k] = (mask >> k) & 1u ? q[k] : 0.0;
  return out;
}

// Node contribution of the gradient part: sum over the four incident edges,
// grouped (left + right) + (down + up) so reflections in z are exact.
inline QComponents edge_part(const Grid& g, const std::vector<QComponents>& a, std::size_t p) {
  const std::size_t nr = g.n_rho();
  const std::size_t i = p % nr, j = p / nr;
  const auto& wh = g.edge_h();
  const auto& wv = g.edge_v();
  const double wl = i > 0 ? wh[p - 1] : 0.0;
  const double wr = wh[p];
  const double wd = j > 0 ? wv[p - nr] : 0.0;
  const double wu = wv[p];
  QComponents out;
  for (std::size_t k = 0; k < kComponents; ++k) {
    const double ak = a[p][k];
    const double l = wl != 0.0 ? wl * (ak - a[p - 1][k]) : 0.0;
    const double r = wr != 0.0 ? wr * (ak - a[p + 1][k]) : 0.0;
    const double d = wd != 0.0 ? wd * (ak - a[p - nr][k]) : 0.0;
    const double u = wu != 0.0 ? wu * (ak - a[p + nr][k]) : 0.0;
    out[k] = 2.0 * ((l + r) + (d + u));
  }
  return out;
}

inline double inv_rho2(double rho) { return rho > 0.0 ? 1.0 / (rho * rho) : 0.0; }

}  // namespace

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += x[k];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

RawEnergy energy(const FieldArray& field, double xi) {
  const Grid& g = *field.grid;
  const std::size_t nr = g.n_rho(), nz = g.n_z();
  const double inv_xi2 = 1.0 / (xi * xi);
  std::vector<double> eg(nz), ep(nz), ef(nz);
  const auto& a = field.q;
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < nz; ++j) {
    double sg = 0.0, sp = 0.0, sf = 0.0;
    for (std::size_t i = 0; i < nr; ++i) {
      const std::size_t p = j * nr + i;
      const double wr = g.edge_h()[p], wu = g.edge_v()[p];
      if (wr != 0.0) sg += wr * sq_diff(a[p], a[p + 1]);
      if (wu != 0.0) sg += wu * sq_diff(a[p], a[p + nr]);
      if (g.has_node_terms(p)) {
        const double m = g.mass(p);
        sp += m * xi_penalty(a[p]) * inv_rho2(g.rho()[i]);
        sf += m * potential(a[p]);
      }
    }
    eg[j] = sg;
    ep[j] = sp;
    ef[j] = sf;
  }
  RawEnergy e;
  e.grad = pairwise_sum(eg.data(), nz);
  e.phi = pairwise_sum(ep.data(), nz);
  e.pot = inv_xi2 * pairwise_sum(ef.data(), nz);
  return e;
}

RawEnergy energy_serial(const FieldArray& field, double xi) {
  const Grid& g = *field.grid;
  const std::size_t nr = g.n_rho();
  RawEnergy e;
  double pot = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (g.edge_h()[p] != 0.0) e.grad += g.edge_h()[p] * sq_diff(field.q[p], field.q[p + 1]);
    if (g.edge_v()[p] != 0.0) e.grad += g.edge_v()[p] * sq_diff(field.q[p], field.q[p + nr]);
    if (!g.has_node_terms(p)) continue;
    const double rho = g.rho_at(p);
    if (rho > 0.0) e.phi += g.mass(p) * xi_penalty(field.q[p]) / (rho * rho);
    pot += g.mass(p) * potential(field.q[p]);
  }
  e.pot = pot / (xi * xi);
  return e;
}

void energy_derivative(const FieldArray& field, double xi, std::vector<QComponents>& out) {
  const Grid& g = *field.grid;
  const std::size_t n = g.size();
  const double inv_xi2 = 1.0 / (xi * xi);
  out.resize(n);
#pragma omp parallel for schedule(static)
  for (std::size_t p = 0; p < n; ++p) {
    const std::uint8_t mask = g.free_mask(p);
    if (mask == 0) {
      out[p] = QComponents{};
      continue;
    }
    QComponents d = edge_part(g, field.q, p);
    const double m = g.mass(p);
    const double ir2 = inv_rho2(g.rho_at(p));
    const QComponents fg = potential_gradient(field.q[p]);
    for (std::size_t k = 0; k < kComponents; ++k)
      d[k] += m * (2.0 * kXiWeights[k] * ir2 * field.q[p][k] + inv_xi2 * fg[k]);
    out[p] = masked(d, mask);
  }
}

void energy_derivative_serial(const FieldArray& field, double xi, std::vector<QComponents>& out) {
  const Grid& g = *field.grid;
  const std::size_t n = g.size(), nr = g.n_rho();
  out.assign(n, QComponents{});
  auto scatter = [&](std::size_t p, std::size_t q, double w) {
    for (std::size_t k = 0; k < kComponents; ++k) {
      const double f = 2.0 * w * (field.q[p][k] - field.q[q][k]);
      out[p][k] += f;
      out[q][k] -= f;
    }
  };
  for (std::size_t p = 0; p < n; ++p) {
    if (g.edge_h()[p] != 0.0) scatter(p, p + 1, g.edge_h()[p]);
    if (g.edge_v()[p] != 0.0) scatter(p, p + nr, g.edge_v()[p]);
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (!g.has_node_terms(p)) continue;
    const double rho = g.rho_at(p);
    const double m = g.mass(p);
    const QComponents fg = potential_gradient(field.q[p]);
    for (std::size_t k = 0; k < kComponents; ++k) {
      if (rho > 0.0) out[p][k] += m * 2.0 * kXiWeights[k] * field.q[p][k] / (rho * rho);
      out[p][k] += m * fg[k] / (xi * xi);
    }
  }
  for (std::size_t p = 0; p < n; ++p) out[p] = masked(out[p], g.free_mask(p));
}

void apply_stiffness(const Grid& g, const std::vector<QComponents>& v, std::vector<QComponents>& out) {
  const std::size_t n = g.size();
  out.resize(n);
  // Prescribed components of v are treated as zero.
  std::vector<QComponents> vm(n);
#pragma omp parallel for schedule(static)
  for (std::size_t p = 0; p < n; ++p) vm[p] = masked(v[p], g.free_mask(p));
#pragma omp parallel for schedule(static)
  for (std::size_t p = 0; p < n; ++p) {
    const std::uint8_t mask = g.free_mask(p);
    if (mask == 0) {
      out[p] = QComponents{};
      continue;
    }
    QComponents d = edge_part(g, vm, p);
    const double c = 2.0 * g.mass(p) * inv_rho2(g.rho_at(p));
    for (std::size_t k = 0; k < kComponents; ++k) d[k] += c * kXiWeights[k] * vm[p][k];
    out[p] = masked(d, mask);
  }
}

double mass_dot(const Grid& g, const std::vector<QComponents>& a, const std::vector<QComponents>& b) {
  const std::size_t nr = g.n_rho(), nz = g.n_z();
  std::vector<double> rows(nz);
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < nz; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < nr; ++i) {
      const std::size_t p = j * nr + i;
      const std::uint8_t mask = g.free_mask(p);
      if (mask == 0) continue;
      double t = 0.0;
      for (std::size_t k = 0; k < kComponents; ++k)
        if ((mask >> k) & 1u) t += a[p][k] * b[p][k];
      s += g.mass(p) * t;
    }
    rows[j] = s;
  }
  return pairwise_sum(rows.data(), nz);
}

double max_abs_free(const Grid& g, const std::vector<QComponents>& a) {
  double m = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const std::uint8_t mask = g.free_mask(p);
    for (std::size_t k = 0; k < kComponents; ++k)
      if ((mask >> k) & 1u) m = std::max(m, std::abs(a[p][k]));
  }
  return m;
}

}  // namespace ldg::kernels
