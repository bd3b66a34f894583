#include "ldg/qtensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ldg/errors.hpp"

namespace ldg {
namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kSqrt6 = std::sqrt(6.0);

Mat3 basis_matrix(std::size_t k) {
  Mat3 m{};
  switch (k) {
    case 0:
      m[0][0] = -1.0 / kSqrt6;
      m[1][1] = -1.0 / kSqrt6;
      m[2][2] = 2.0 / kSqrt6;
      break;
    case 1:
      m[0][0] = 1.0 / kSqrt2;
      m[1][1] = -1.0 / kSqrt2;
      break;
    case 2:
      m[0][1] = m[1][0] = 1.0 / kSqrt2;
      break;
    case 3:
      m[0][2] = m[2][0] = 1.0 / kSqrt2;
      break;
    default:
      m[1][2] = m[2][1] = 1.0 / kSqrt2;
      break;
  }
  return m;
}

Mat3 multiply(const Mat3& x, const Mat3& y) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      double s = 0.0;
      for (int j = 0; j < 3; ++j) s += x[i][j] * y[j][k];
      r[i][k] = s;
    }
  return r;
}

// T[k][l][m] = tr((E_k E_l + E_l E_k) E_m), used by the Hessian of tr(Q^3).
struct CubicTensor {
  double t[5][5][5];
  CubicTensor() {
    for (std::size_t k = 0; k < 5; ++k)
      for (std::size_t l = 0; l < 5; ++l) {
        const Mat3 a = multiply(basis_matrix(k), basis_matrix(l));
        const Mat3 b = multiply(basis_matrix(l), basis_matrix(k));
        for (std::size_t m = 0; m < 5; ++m) {
          const Mat3 e = basis_matrix(m);
          double s = 0.0;
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) s += (a[i][j] + b[i][j]) * e[j][i];
          t[k][l][m] = s;
        }
      }
  }
};

const CubicTensor& cubic() {
  static const CubicTensor instance;
  return instance;
}

double trace_cube(const Mat3& q) {
  const Mat3 q2 = multiply(q, q);
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += q2[i][j] * q[j][i];
  return s;
}

Vec3 cross(const Vec3& u, const Vec3& v) {
  return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

double dot(const Vec3& u, const Vec3& v) { return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]; }

// Cyclic Jacobi for the 3x3 fallback path.
SymEigen3 jacobi3(Mat3 a) {
  Mat3 v{};
  for (int i = 0; i < 3; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 50; ++sweep) {
    const double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    if (off < 1e-300) break;
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
  }
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int x, int y) { return a[x][x] > a[y][y]; });
  SymEigen3 out;
  for (int c = 0; c < 3; ++c) {
    out.values[c] = a[order[c]][order[c]];
    for (int r = 0; r < 3; ++r) out.vectors[r][c] = v[r][order[c]];
  }
  return out;
}

}  // namespace

QComponents UniaxialTensor::components() const { return uniaxial(n); }

QComponents q_infinity() { return QComponents{{std::sqrt(2.0 / 3.0), 0.0, 0.0, 0.0, 0.0}}; }

QComponents uniaxial(const Vec3& n_in) {
  const double len = std::sqrt(dot(n_in, n_in));
  const Vec3 n{n_in[0] / len, n_in[1] / len, n_in[2] / len};
  QComponents q;
  q[0] = (3.0 * n[2] * n[2] - 1.0) / kSqrt6;
  q[1] = (n[0] * n[0] - n[1] * n[1]) / kSqrt2;
  q[2] = kSqrt2 * n[0] * n[1];
  q[3] = kSqrt2 * n[0] * n[2];
  q[4] = kSqrt2 * n[1] * n[2];
  return q;
}

Mat3 to_matrix(const QComponents& q) {
  Mat3 m{};
  m[0][0] = -q[0] / kSqrt6 + q[1] / kSqrt2;
  m[1][1] = -q[0] / kSqrt6 - q[1] / kSqrt2;
  m[2][2] = 2.0 * q[0] / kSqrt6;
  m[0][1] = m[1][0] = q[2] / kSqrt2;
  m[0][2] = m[2][0] = q[3] / kSqrt2;
  m[1][2] = m[2][1] = q[4] / kSqrt2;
  return m;
}

QComponents project_components(const Mat3& m) {
  QComponents q;
  q[0] = (2.0 * m[2][2] - m[0][0] - m[1][1]) / kSqrt6;
  q[1] = (m[0][0] - m[1][1]) / kSqrt2;
  q[2] = (m[0][1] + m[1][0]) / kSqrt2;
  q[3] = (m[0][2] + m[2][0]) / kSqrt2;
  q[4] = (m[1][2] + m[2][1]) / kSqrt2;
  return q;
}

QComponents from_matrix(const Mat3& m) {
  constexpr double tol = 1e-10;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(m[i][j] - m[j][i]) > tol) throw InvalidInput("from_matrix: matrix is not symmetric");
  if (std::abs(m[0][0] + m[1][1] + m[2][2]) > tol) throw InvalidInput("from_matrix: matrix has nonzero trace");
  return project_components(m);
}

double potential(const QComponents& q, const PotentialParams& params) {
  const double s = q.norm2();
  return -0.5 * s - trace_cube(to_matrix(q)) + 0.75 * s * s + params.C;
}

QComponents potential_gradient(const QComponents& q, const PotentialParams&) {
  // -Q - 3 Q^2 + 3|Q|^2 Q; the identity part of Q^2 drops out against the traceless basis.
  const Mat3 m = to_matrix(q);
  const Mat3 m2 = multiply(m, m);
  const double s = q.norm2();
  Mat3 g{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g[i][j] = -m[i][j] - 3.0 * m2[i][j] + 3.0 * s * m[i][j];
  return project_components(g);
}

Mat5 potential_hessian(const QComponents& q) {
  const auto& t = cubic().t;
  const double s = q.norm2();
  Mat5 h{};
  for (std::size_t k = 0; k < 5; ++k)
    for (std::size_t l = k; l < 5; ++l) {
      double cub = 0.0;
      for (std::size_t m = 0; m < 5; ++m) cub += t[k][l][m] * q[m];
      double v = 6.0 * q[k] * q[l] - 3.0 * cub;
      if (k == l) v += -1.0 + 3.0 * s;
      h[k][l] = h[l][k] = v;
    }
  return h;
}

double xi_penalty(const QComponents& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < kComponents; ++i) s += kXiWeights[i] * q[i] * q[i];
  return s;
}

SymEigen3 eigen_symmetric(const Mat3& m) {
  // Closed-form eigenvalues (trigonometric form of the cubic).
  const double p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
  const double tr = m[0][0] + m[1][1] + m[2][2];
  const double qm = tr / 3.0;
  const double p2 = (m[0][0] - qm) * (m[0][0] - qm) + (m[1][1] - qm) * (m[1][1] - qm) +
                    (m[2][2] - qm) * (m[2][2] - qm) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  if (p < 1e-300) {
    SymEigen3 out;
    out.values = {qm, qm, qm};
    for (int i = 0; i < 3; ++i) out.vectors[i][i] = 1.0;
    return out;
  }
  Mat3 b{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b[i][j] = (m[i][j] - (i == j ? qm : 0.0)) / p;
  const double detb = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                      b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                      b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
  const double r = std::clamp(detb / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double l1 = qm + 2.0 * p * std::cos(phi);
  const double l3 = qm + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  const double l2 = tr - l1 - l3;

  // Near-degenerate spectra make the cross-product eigenvectors inaccurate.
  const double disc_scale = std::max({std::abs(l1 - l2), std::abs(l2 - l3)});
  if (std::min(std::abs(l1 - l2), std::abs(l2 - l3)) < 1e-6 * std::max(disc_scale, p)) return jacobi3(m);

  SymEigen3 out;
  out.values = {l1, l2, l3};
  const double lam[3] = {l1, l2, l3};
  for (int c = 0; c < 3; ++c) {
    const Vec3 r0{m[0][0] - lam[c], m[0][1], m[0][2]};
    const Vec3 r1{m[1][0], m[1][1] - lam[c], m[1][2]};
    const Vec3 r2{m[2][0], m[2][1], m[2][2] - lam[c]};
    const Vec3 c01 = cross(r0, r1), c02 = cross(r0, r2), c12 = cross(r1, r2);
    const double n01 = dot(c01, c01), n02 = dot(c02, c02), n12 = dot(c12, c12);
    Vec3 v = c01;
    double nv = n01;
    if (n02 > nv) v = c02, nv = n02;
    if (n12 > nv) v = c12, nv = n12;
    if (nv < 1e-24 * p * p * p * p) return jacobi3(m);
    const double len = std::sqrt(nv);
    for (int i = 0; i < 3; ++i) out.vectors[i][c] = v[i] / len;
  }
  // One step of refinement keeps the three vectors orthonormal to round-off.
  Vec3 v0{out.vectors[0][0], out.vectors[1][0], out.vectors[2][0]};
  Vec3 v1{out.vectors[0][1], out.vectors[1][1], out.vectors[2][1]};
  const double d01 = dot(v0, v1);
  for (int i = 0; i < 3; ++i) v1[i] -= d01 * v0[i];
  const double n1 = std::sqrt(dot(v1, v1));
  for (int i = 0; i < 3; ++i) v1[i] /= n1;
  const Vec3 v2 = cross(v0, v1);
  for (int i = 0; i < 3; ++i) {
    out.vectors[i][1] = v1[i];
    out.vectors[i][2] = v2[i];
  }
  return out;
}

UniaxialTensor project_uniaxial(const QComponents& q, double gap_tol) {
  const SymEigen3 e = eigen_symmetric(to_matrix(q));
  if (e.values[0] - e.values[1] <= gap_tol)
    throw ProjectionUndefined("project_uniaxial: leading eigenvalue is degenerate");
  return UniaxialTensor{{e.vectors[0][0], e.vectors[1][0], e.vectors[2][0]}};
}

bool potential_normalisation_ok() {
  return std::abs(potential(q_infinity())) < 1e-14 && std::abs(potential(uniaxial({1.0, 0.0, 0.0}))) < 1e-14;
}

SymEigen5 eigen_symmetric5(const Mat5& m) {
  Mat5 a = m;
  Mat5 v{};
  for (int i = 0; i < 5; ++i) v[i][i] = 1.0;
  double scale = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) scale = std::max(scale, std::abs(a[i][j]));
  for (int sweep = 0; sweep < 30; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < 5; ++p)
      for (int q = p + 1; q < 5; ++q) off += a[p][q] * a[p][q];
    if (off <= 1e-30 * scale * scale || off == 0.0) break;
    for (int p = 0; p < 4; ++p)
      for (int q = p + 1; q < 5; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 5; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 5; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 5; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
  }
  SymEigen5 out;
  for (int k = 0; k < 5; ++k) {
    out.values[k] = a[k][k];
    for (int i = 0; i < 5; ++i) out.vectors[k][i] = v[i][k];
  }
  return out;
}

Mat5 clip_negative(const Mat5& h) {
  const SymEigen5 e = eigen_symmetric5(h);
  Mat5 r{};
  for (int k = 0; k < 5; ++k) {
    const double lam = std::max(e.values[k], 0.0);
    if (lam == 0.0) continue;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) r[i][j] += lam * e.vectors[k][i] * e.vectors[k][j];
  }
  return r;
}

Mat5 rotation_about_e2(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  const Mat3 rot{{{c, 0.0, s}, {0.0, 1.0, 0.0}, {-s, 0.0, c}}};
  Mat3 rt{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) rt[i][j] = rot[j][i];
  Mat5 out{};
  for (std::size_t k = 0; k < 5; ++k) {
    const Mat3 img = multiply(multiply(rot, basis_matrix(k)), rt);
    const QComponents col = project_components(img);
    for (std::size_t l = 0; l < 5; ++l) out[l][k] = col[l];
  }
  return out;
}

}  // namespace ldg
