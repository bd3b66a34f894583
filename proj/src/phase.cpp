#include "ldg/phase.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <numbers>

#include "ldg/errors.hpp"
#include "ldg/grid.hpp"

namespace ldg {
namespace {

constexpr double kPi = std::numbers::pi;

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

std::vector<double> rho_widths(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = i == 0 ? x[0] : 0.5 * (x[i - 1] + x[i]);
    const double hi = i + 1 == n ? x[n - 1] : 0.5 * (x[i] + x[i + 1]);
    w[i] = 0.5 * (hi * hi - lo * lo);
  }
  return w;
}

// Edge list and node masses of the masked grid; edges with two fixed ends are dropped.
struct Discretization {
  struct Edge {
    std::size_t a, b;
    double w;
  };
  std::vector<Edge> edges;
  std::vector<double> mass;
  std::vector<double> inv_rho2;  // 0 on the axis

  explicit Discretization(const PhaseField& f) {
    const std::size_t nr = f.n_rho(), nz = f.n_z();
    const auto rw = rho_widths(f.rho);
    const auto zw = dual_widths(f.z);
    mass.resize(nr * nz);
    inv_rho2.resize(nr * nz);
    for (std::size_t j = 0; j < nz; ++j)
      for (std::size_t i = 0; i < nr; ++i) {
        const std::size_t p = f.index(i, j);
        mass[p] = rw[i] * zw[j];
        inv_rho2[p] = f.rho[i] > 0.0 ? 1.0 / (f.rho[i] * f.rho[i]) : 0.0;
      }
    for (std::size_t j = 0; j < nz; ++j)
      for (std::size_t i = 0; i < nr; ++i) {
        const std::size_t p = f.index(i, j);
        if (i + 1 < nr) {
          const std::size_t q = p + 1;
          if (f.status[p] == PhaseField::free_node || f.status[q] == PhaseField::free_node) {
            const double rm = 0.5 * (f.rho[i] + f.rho[i + 1]);
            edges.push_back({p, q, rm * zw[j] / (f.rho[i + 1] - f.rho[i])});
          }
        }
        if (j + 1 < nz) {
          const std::size_t q = p + nr;
          if (f.status[p] == PhaseField::free_node || f.status[q] == PhaseField::free_node)
            edges.push_back({p, q, rw[i] / (f.z[j + 1] - f.z[j])});
        }
      }
  }

  double energy(const PhaseField& f, const std::vector<double>& phi) const {
    double e = 0.0;
    for (const auto& ed : edges) {
      const double d = phi[ed.a] - phi[ed.b];
      e += ed.w * d * d;
    }
    for (std::size_t p = 0; p < phi.size(); ++p)
      if (f.status[p] == PhaseField::free_node) {
        const double c = std::cos(phi[p]);
        e += mass[p] * c * c * inv_rho2[p];
      }
    return e;
  }

  // Derivative of the energy with respect to free node values (zero at fixed nodes).
  std::vector<double> derivative(const PhaseField& f, const std::vector<double>& phi) const {
    std::vector<double> g(phi.size(), 0.0);
    for (const auto& ed : edges) {
      const double d = 2.0 * ed.w * (phi[ed.a] - phi[ed.b]);
      g[ed.a] += d;
      g[ed.b] -= d;
    }
    for (std::size_t p = 0; p < phi.size(); ++p) {
      if (f.status[p] != PhaseField::free_node) {
        g[p] = 0.0;
        continue;
      }
      g[p] -= mass[p] * std::sin(2.0 * phi[p]) * inv_rho2[p];
    }
    return g;
  }
};

double polar_theta(double rho, double z) { return std::atan2(z, rho - 1.0); }

void validate(double delta, int tau, const PhaseOptions& opts) {
  if (!(delta > 0.0 && delta < 0.5)) throw InvalidInput("phase problem needs 0 < delta < 1/2");
  if (!(opts.r_out > 0.5)) throw InvalidInput("phase problem needs r_out > 1/2");
  if (tau != 1 && tau != -1) throw InvalidInput("tau must be +1 or -1");
  if (opts.cells_per_delta < 1 || !(opts.h_max > 0.0) || !(opts.growth >= 1.0))
    throw InvalidInput("invalid phase grid options");
}

// Free-node indexing for the sparse solves.
struct FreeIndex {
  std::vector<long> of_node;
  std::vector<std::size_t> nodes;
  explicit FreeIndex(const PhaseField& f) : of_node(f.phi.size(), -1) {
    for (std::size_t p = 0; p < f.phi.size(); ++p)
      if (f.status[p] == PhaseField::free_node) {
        of_node[p] = static_cast<long>(nodes.size());
        nodes.push_back(p);
      }
  }
};

// 2 * (stiffness) + diag(extra) restricted to free nodes.
Eigen::SparseMatrix<double> assemble(const Discretization& d, const FreeIndex& fi, const std::vector<double>& diag) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(4 * d.edges.size() + fi.nodes.size());
  for (const auto& ed : d.edges) {
    const long a = fi.of_node[ed.a], b = fi.of_node[ed.b];
    const double w = 2.0 * ed.w;
    if (a >= 0) t.emplace_back(a, a, w);
    if (b >= 0) t.emplace_back(b, b, w);
    if (a >= 0 && b >= 0) {
      t.emplace_back(a, b, -w);
      t.emplace_back(b, a, -w);
    }
  }
  for (std::size_t k = 0; k < fi.nodes.size(); ++k) t.emplace_back(k, k, diag[fi.nodes[k]]);
  const auto n = static_cast<Eigen::Index>(fi.nodes.size());
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

double phase_theta0(double r) {
  return r <= std::sqrt(2.0) ? 0.5 * kPi + std::asin(0.5 * r) : 0.5 * kPi + std::asin(1.0 / r);
}

double phase_theta1(double r) { return 2.0 * phase_theta0(r) - kPi; }

double phase_boundary(int tau, double r, double theta) {
  const double lambda = (tau * 0.5 * kPi - phase_theta1(r)) / phase_theta0(r);
  return tau * 0.5 * kPi - lambda * theta;
}

PhaseField phase_initial_guess(double delta, int tau, const PhaseOptions& opts) {
  validate(delta, tau, opts);
  PhaseField f;
  f.delta = delta;
  f.tau = tau;
  f.r_out = opts.r_out;
  const double h = delta / opts.cells_per_delta;
  f.rho = graded_coordinates(0.0, 1.0 + opts.r_out, 1.0 - 2.0 * delta, 1.0 + 2.0 * delta, h, opts.h_max, opts.growth);
  f.z = graded_coordinates(0.0, opts.r_out, 0.0, 2.0 * delta, h, opts.h_max, opts.growth);
  const std::size_t nr = f.n_rho(), nz = f.n_z();
  f.status.assign(nr * nz, PhaseField::free_node);
  f.phi.assign(nr * nz, 0.0);
  const double far = tau * 0.5 * kPi;
  for (std::size_t j = 0; j < nz; ++j)
    for (std::size_t i = 0; i < nr; ++i) {
      const std::size_t p = f.index(i, j);
      const double rho = f.rho[i], z = f.z[j];
      const double r = std::hypot(rho - 1.0, z);
      auto fix = [&](double v) {
        f.status[p] = PhaseField::fixed;
        f.phi[p] = v;
      };
      if (r >= opts.r_out)
        fix(far);
      else if (rho * rho + z * z <= 1.0)
        fix(std::atan2(z, rho));
      else if (r <= delta)
        fix(phase_boundary(tau, r, polar_theta(rho, z)));
      else if (z == 0.0)
        fix(far);
    }

  // Harmonic extension: solve the weighted Laplace problem with the fixed data.
  const Discretization d(f);
  const FreeIndex fi(f);
  const std::vector<double> zero(f.phi.size(), 0.0);
  const Eigen::SparseMatrix<double> K = assemble(d, fi, zero);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fi.nodes.size()));
  for (const auto& ed : d.edges) {
    const long a = fi.of_node[ed.a], b = fi.of_node[ed.b];
    if (a >= 0 && b < 0) rhs[a] += 2.0 * ed.w * f.phi[ed.b];
    if (b >= 0 && a < 0) rhs[b] += 2.0 * ed.w * f.phi[ed.a];
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(K);
  if (solver.info() != Eigen::Success) throw SolverFailure("phase: Laplace factorisation failed");
  const Eigen::VectorXd x = solver.solve(rhs);
  for (std::size_t k = 0; k < fi.nodes.size(); ++k) f.phi[fi.nodes[k]] = x[static_cast<Eigen::Index>(k)];
  return f;
}

double phase_energy(const PhaseField& field) { return Discretization(field).energy(field, field.phi); }

std::vector<double> phase_residual(const PhaseField& field) {
  const Discretization d(field);
  std::vector<double> g = d.derivative(field, field.phi);
  std::vector<double> out;
  for (std::size_t p = 0; p < g.size(); ++p)
    if (field.status[p] == PhaseField::free_node) out.push_back(-g[p] / (2.0 * d.mass[p]));
  return out;
}

PhaseResult phase_minimize(double delta, int tau, const PhaseOptions& opts) {
  PhaseResult res;
  res.field = phase_initial_guess(delta, tau, opts);
  PhaseField& f = res.field;
  const Discretization d(f);
  const FreeIndex fi(f);

  auto residual_norm = [&](const std::vector<double>& g) {
    double m = 0.0;
    for (std::size_t p : fi.nodes) m = std::max(m, std::abs(g[p]) / (2.0 * d.mass[p]));
    return m;
  };

  double e = d.energy(f, f.phi);
  res.energy_history.push_back(e);
  std::vector<double> g = d.derivative(f, f.phi);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  bool analysed = false;
  for (int it = 0; it < opts.max_iter; ++it) {
    res.residual = residual_norm(g);
    if (res.residual <= opts.tol) {
      res.iterations = it;
      res.energy = e;
      return res;
    }
    // Hessian of the node term with negative curvature clipped.
    std::vector<double> diag(f.phi.size(), 0.0);
    for (std::size_t p : fi.nodes) diag[p] = std::max(0.0, -2.0 * std::cos(2.0 * f.phi[p]) * d.mass[p] * d.inv_rho2[p]);
    const Eigen::SparseMatrix<double> H = assemble(d, fi, diag);
    if (!analysed) {
      solver.analyzePattern(H);
      analysed = true;
    }
    solver.factorize(H);
    if (solver.info() != Eigen::Success) throw SolverFailure("phase: Newton factorisation failed");
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(fi.nodes.size()));
    for (std::size_t k = 0; k < fi.nodes.size(); ++k) rhs[static_cast<Eigen::Index>(k)] = -g[fi.nodes[k]];
    const Eigen::VectorXd step = solver.solve(rhs);

    double t = 1.0;
    std::vector<double> trial = f.phi;
    double e_trial = e;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      for (std::size_t k = 0; k < fi.nodes.size(); ++k)
        trial[fi.nodes[k]] = f.phi[fi.nodes[k]] + t * step[static_cast<Eigen::Index>(k)];
      e_trial = d.energy(f, trial);
      // Near the minimum the energy change drops below rounding; accept such steps.
      if (e_trial <= e + 1e-13 * std::abs(e)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    f.phi = trial;
    const double de = e - e_trial;
    e = e_trial;
    res.energy_history.push_back(e);
    g = d.derivative(f, f.phi);
    if (de <= 0.0 && t < 1.0) break;
  }
  res.residual = residual_norm(g);
  res.energy = e;
  res.iterations = static_cast<int>(res.energy_history.size()) - 1;
  if (res.residual <= opts.tol) return res;
  throw SolverFailure("phase problem did not converge (residual " + std::to_string(res.residual) + ")");
}

}  // namespace ldg
