#pragma once

// Traceless symmetric 3x3 tensors in a fixed orthonormal basis, the bulk
// Landau-de Gennes potential, and the azimuthal penalty of the axisymmetric
// reduction.
//
// Basis (Frobenius-orthonormal):
//   E0 = (3 e3e3 - I)/sqrt6     E1 = (e1e1 - e2e2)/sqrt2
//   E2 = (e1e2 + e2e1)/sqrt2    E3 = (e1e3 + e3e1)/sqrt2
//   E4 = (e2e3 + e3e2)/sqrt2

#include <array>
#include <cmath>
#include <cstddef>

namespace ldg {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;
using Mat5 = std::array<std::array<double, 5>, 5>;

inline constexpr std::size_t kComponents = 5;

/// Coefficients of a traceless symmetric tensor in the basis E0..E4.
struct QComponents {
  std::array<double, kComponents> a{};

  double& operator[](std::size_t i) { return a[i]; }
  double operator[](std::size_t i) const { return a[i]; }

  QComponents& operator+=(const QComponents& o) {
    for (std::size_t i = 0; i < kComponents; ++i) a[i] += o.a[i];
    return *this;
  }
  QComponents& operator-=(const QComponents& o) {
    for (std::size_t i = 0; i < kComponents; ++i) a[i] -= o.a[i];
    return *this;
  }
  QComponents& operator*=(double s) {
    for (auto& v : a) v *= s;
    return *this;
  }
  friend QComponents operator+(QComponents l, const QComponents& r) { return l += r; }
  friend QComponents operator-(QComponents l, const QComponents& r) { return l -= r; }
  friend QComponents operator*(double s, QComponents q) { return q *= s; }
  friend QComponents operator*(QComponents q, double s) { return q *= s; }
  friend bool operator==(const QComponents&, const QComponents&) = default;

  double norm2() const {
    double s = 0.0;
    for (double v : a) s += v * v;
    return s;
  }
};

/// Director n and its tensor n (x) n - I/3.
struct UniaxialTensor {
  Vec3 n{0.0, 0.0, 1.0};

  QComponents components() const;
};

struct PotentialParams {
  double C = 2.0 / 9.0;
  double xi = 1.0;
};

/// Weights c_i with Xi[Q] = sum_i c_i a_i^2.
inline constexpr std::array<double, kComponents> kXiWeights{0.0, 4.0, 4.0, 1.0, 1.0};

/// Components of e3 (x) e3 - I/3.
QComponents q_infinity();

/// Components of n (x) n - I/3 (n need not be normalised; it is normalised here).
QComponents uniaxial(const Vec3& n);

Mat3 to_matrix(const QComponents& q);

/// Expand a symmetric traceless matrix in the basis. Throws InvalidInput if the
/// matrix is not symmetric or its trace exceeds 1e-10.
QComponents from_matrix(const Mat3& m);

/// Frobenius projection of an arbitrary matrix onto the basis (no validation).
QComponents project_components(const Mat3& m);

/// f(Q) = -|Q|^2/2 - tr(Q^3) + 3|Q|^4/4 + C.
double potential(const QComponents& q, const PotentialParams& params = {});

/// Components of the traceless gradient of f.
QComponents potential_gradient(const QComponents& q, const PotentialParams& params = {});

/// Hessian of f with respect to the five coefficients.
Mat5 potential_hessian(const QComponents& q);

/// Xi[Q] = |d/dphi (R_phi Q R_phi^t)|^2 = 4(a1^2 + a2^2) + a3^2 + a4^2.
double xi_penalty(const QComponents& q);

/// Eigen-decomposition of a symmetric 3x3 matrix, eigenvalues in descending order,
/// eigenvectors as columns.
struct SymEigen3 {
  Vec3 values{};
  Mat3 vectors{};
};
SymEigen3 eigen_symmetric(const Mat3& m);

/// Nearest point of the uniaxial manifold. Throws ProjectionUndefined when the gap
/// between the two largest eigenvalues is below gap_tol.
UniaxialTensor project_uniaxial(const QComponents& q, double gap_tol = 1e-8);

/// Startup check that the normalisation constant makes f vanish on the uniaxial manifold.
bool potential_normalisation_ok();

/// Symmetric 5x5 eigen-decomposition by cyclic Jacobi sweeps (fixed sweep order).
/// Values are not sorted. vectors[k] holds the k-th eigenvector.
struct SymEigen5 {
  std::array<double, 5> values{};
  Mat5 vectors{};
};
SymEigen5 eigen_symmetric5(const Mat5& m);

/// Hessian with negative eigenvalues clipped to zero.
Mat5 clip_negative(const Mat5& h);

/// Matrix of the map Q -> R Q R^t acting on components, with R the rotation about
/// e2 taking e3 to (sin g, 0, cos g).
Mat5 rotation_about_e2(double angle);

}  // namespace ldg
