#include "ldg/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numbers>

#include "ldg/errors.hpp"
#include "ldg/kernels.hpp"

namespace ldg {
namespace {

using Vec = std::vector<QComponents>;
using SpMat = Eigen::SparseMatrix<double>;

constexpr std::array<int, 3> kPlanar{0, 1, 3};

double dot(const Grid& g, const Vec& a, const Vec& b) {
  const std::size_t nr = g.n_rho(), nz = g.n_z();
  std::vector<double> rows(nz);
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < nz; ++j) {
    double s = 0.0;
    for (std::size_t p = j * nr; p < (j + 1) * nr; ++p)
      for (std::size_t k = 0; k < kComponents; ++k) s += a[p][k] * b[p][k];
    rows[j] = s;
  }
  return kernels::pairwise_sum(rows.data(), nz);
}

void axpy(double alpha, const Vec& x, Vec& y) {
  const std::size_t n = x.size();
#pragma omp parallel for schedule(static)
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t k = 0; k < kComponents; ++k) y[p][k] += alpha * x[p][k];
}

QComponents mat_vec(const Mat5& m, const QComponents& v) {
  QComponents out;
  for (std::size_t i = 0; i < 5; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 5; ++j) s += m[i][j] * v[j];
    out[i] = s;
  }
  return out;
}

QComponents masked(const QComponents& q, std::uint8_t mask) {
  QComponents out;
  for (std::size_t k = 0; k < kComponents; ++k) out[k] = (mask >> k) & 1u ? q[k] : 0.0;
  return out;
}

// A = M/dt + K + pot_scale * M * H_p (H_p per node), restricted to free components.
struct StepOperator {
  const Grid* g = nullptr;
  double inv_dt = 0.0;
  double pot_scale = 0.0;
  const std::vector<Mat5>* hess = nullptr;

  void apply(const Vec& v, Vec& out) const {
    kernels::apply_stiffness(*g, v, out);
    const std::size_t n = g->size();
#pragma omp parallel for schedule(static)
    for (std::size_t p = 0; p < n; ++p) {
      const std::uint8_t mask = g->free_mask(p);
      if (mask == 0) continue;
      const double m = g->mass(p);
      const QComponents vm = masked(v[p], mask);
      QComponents add = (m * inv_dt) * vm;
      if (pot_scale != 0.0) add += (m * pot_scale) * mat_vec((*hess)[p], vm);
      out[p] += masked(add, mask);
    }
  }
};

class BlockJacobi {
 public:
  void factor(const Grid& g, double inv_dt, double pot_scale, const std::vector<Mat5>* hc) {
    const std::size_t n = g.size();
    blocks_.assign(n, Mat5{});
    masks_.resize(n);
#pragma omp parallel for schedule(static)
    for (std::size_t p = 0; p < n; ++p) {
      const std::uint8_t mask = g.free_mask(p);
      masks_[p] = mask;
      if (mask == 0) continue;
      const std::size_t nr = g.n_rho();
      const std::size_t i = p % nr, j = p / nr;
      double wsum = g.edge_h()[p] + g.edge_v()[p];
      if (i > 0) wsum += g.edge_h()[p - 1];
      if (j > 0) wsum += g.edge_v()[p - nr];
      const double m = g.mass(p);
      const double rho = g.rho_at(p);
      const double ir2 = rho > 0.0 ? 1.0 / (rho * rho) : 0.0;
      Mat5 a{};
      for (std::size_t k = 0; k < 5; ++k) {
        for (std::size_t l = 0; l < 5; ++l) a[k][l] = pot_scale != 0.0 ? m * pot_scale * (*hc)[p][k][l] : 0.0;
        a[k][k] += m * inv_dt + 2.0 * wsum + 2.0 * m * kXiWeights[k] * ir2;
      }
      for (std::size_t k = 0; k < 5; ++k)
        for (std::size_t l = 0; l < 5; ++l)
          if (!((mask >> k) & 1u) || !((mask >> l) & 1u)) a[k][l] = k == l ? 1.0 : 0.0;
      // In-place Cholesky (lower triangle).
      for (std::size_t k = 0; k < 5; ++k) {
        double d = a[k][k];
        for (std::size_t s = 0; s < k; ++s) d -= a[k][s] * a[k][s];
        a[k][k] = std::sqrt(std::max(d, 1e-300));
        for (std::size_t r = k + 1; r < 5; ++r) {
          double v = a[r][k];
          for (std::size_t s = 0; s < k; ++s) v -= a[r][s] * a[k][s];
          a[r][k] = v / a[k][k];
        }
      }
      blocks_[p] = a;
    }
  }

  void apply(const Vec& r, Vec& z) const {
    const std::size_t n = r.size();
    z.resize(n);
#pragma omp parallel for schedule(static)
    for (std::size_t p = 0; p < n; ++p) {
      if (masks_[p] == 0) {
        z[p] = QComponents{};
        continue;
      }
      const Mat5& l = blocks_[p];
      const QComponents b = masked(r[p], masks_[p]);
      double y[5];
      for (std::size_t k = 0; k < 5; ++k) {
        double v = b[k];
        for (std::size_t s = 0; s < k; ++s) v -= l[k][s] * y[s];
        y[k] = v / l[k][k];
      }
      QComponents x;
      for (std::size_t k = 5; k-- > 0;) {
        double v = y[k];
        for (std::size_t s = k + 1; s < 5; ++s) v -= l[s][k] * x[s];
        x[k] = v / l[k][k];
      }
      z[p] = masked(x, masks_[p]);
    }
  }

 private:
  std::vector<Mat5> blocks_;
  std::vector<std::uint8_t> masks_;
};

// Per-node rotation of the (a0, a1, a3) block so that a uniaxial in-plane state
// looks like Q_inf; the preconditioner then drops coupling between rotated
// components and factors one scalar sparse matrix per component.
class SlotCholesky {
 public:
  void factor(const FieldArray& f, double inv_dt, double pot_scale, const std::vector<Mat5>* hc) {
    const Grid& g = *f.grid;
    const std::size_t n = g.size(), nr = g.n_rho();
    if (grid_ != &g) analyze(g);

    rot_.resize(n);
#pragma omp parallel for schedule(static)
    for (std::size_t p = 0; p < n; ++p) rot_[p] = planar_rotation(g, f[p], p);

    for (std::size_t k = 0; k < 5; ++k) {
      const auto& nodes = nodes_[k];
      const auto& idx = index_[k];
      std::vector<Eigen::Triplet<double>> trip;
      trip.reserve(nodes.size() * 3);
      const int ik = planar_slot(k);
      for (std::size_t row = 0; row < nodes.size(); ++row) {
        const std::size_t p = nodes[row];
        const std::size_t i = p % nr, j = p / nr;
        const double m = g.mass(p);
        const double rho = g.rho_at(p);
        const double ir2 = rho > 0.0 ? 1.0 / (rho * rho) : 0.0;
        double diag = m * inv_dt;
        auto edge = [&](std::size_t q, double w) {
          if (w == 0.0) return;
          diag += 2.0 * w;
          const int col = idx[q];
          if (col < 0 || static_cast<std::size_t>(col) > row) return;
          const double c = ik >= 0 ? overlap(rot_[p], rot_[q], ik) : 1.0;
          trip.emplace_back(static_cast<int>(row), col, -2.0 * w * c);
        };
        if (i > 0) edge(p - 1, g.edge_h()[p - 1]);
        if (i + 1 < nr) edge(p + 1, g.edge_h()[p]);
        if (j > 0) edge(p - nr, g.edge_v()[p - nr]);
        if (p + nr < n) edge(p + nr, g.edge_v()[p]);
        // Rotated diagonal of the Xi and potential terms.
        const auto t = column(rot_[p], k);
        for (std::size_t l = 0; l < 5; ++l) diag += t[l] * t[l] * 2.0 * m * kXiWeights[l] * ir2;
        if (pot_scale != 0.0) {
          const Mat5& h = (*hc)[p];
          double s = 0.0;
          for (std::size_t a = 0; a < 5; ++a)
            for (std::size_t b = 0; b < 5; ++b) s += t[a] * h[a][b] * t[b];
          diag += m * pot_scale * s;
        }
        trip.emplace_back(static_cast<int>(row), static_cast<int>(row), diag);
      }
      SpMat a(static_cast<int>(nodes.size()), static_cast<int>(nodes.size()));
      a.setFromTriplets(trip.begin(), trip.end());
      if (!analyzed_[k]) {
        llt_[k].analyzePattern(a);
        analyzed_[k] = true;
      }
      llt_[k].factorize(a);
      if (llt_[k].info() != Eigen::Success) throw NumericFailure("preconditioner factorization failed");
    }
  }

  void apply(const Vec& r, Vec& z) const {
    const std::size_t n = r.size();
    z.assign(n, QComponents{});
    for (std::size_t k = 0; k < 5; ++k) {
      const auto& nodes = nodes_[k];
      Eigen::VectorXd y(static_cast<Eigen::Index>(nodes.size()));
      for (std::size_t row = 0; row < nodes.size(); ++row) {
        const std::size_t p = nodes[row];
        const auto t = column(rot_[p], k);
        double s = 0.0;
        for (std::size_t l = 0; l < 5; ++l) s += t[l] * r[p][l];
        y[static_cast<Eigen::Index>(row)] = s;
      }
      const Eigen::VectorXd x = llt_[k].solve(y);
      for (std::size_t row = 0; row < nodes.size(); ++row) {
        const std::size_t p = nodes[row];
        const auto t = column(rot_[p], k);
        for (std::size_t l = 0; l < 5; ++l) z[p][l] += t[l] * x[static_cast<Eigen::Index>(row)];
      }
    }
  }

 private:
  // 3x3 rotation acting on (a0, a1, a3); identity on (a2, a4).
  using Rot3 = std::array<std::array<double, 3>, 3>;

  static int planar_slot(std::size_t k) {
    for (int s = 0; s < 3; ++s)
      if (kPlanar[s] == static_cast<int>(k)) return s;
    return -1;
  }

  static std::array<double, 5> column(const Rot3& r, std::size_t k) {
    std::array<double, 5> t{};
    const int s = planar_slot(k);
    if (s < 0) {
      t[k] = 1.0;
      return t;
    }
    for (int l = 0; l < 3; ++l) t[kPlanar[l]] = r[l][s];
    return t;
  }

  static double overlap(const Rot3& a, const Rot3& b, int s) {
    double v = 0.0;
    for (int l = 0; l < 3; ++l) v += a[l][s] * b[l][s];
    return v;
  }

  static Rot3 planar_rotation(const Grid& g, const QComponents& q, std::size_t p) {
    double gamma = 0.0;
    const NodeClass c = g.cls(p);
    if (c != NodeClass::axis) {
      const Mat3 m = to_matrix(q);
      gamma = 0.5 * std::atan2(2.0 * m[0][2], m[2][2] - m[0][0]);
      if (c == NodeClass::mirror_line) gamma = std::abs(std::sin(gamma)) > std::sqrt(0.5) ? 0.5 * std::numbers::pi : 0.0;
    }
    const Mat5 full = rotation_about_e2(gamma);
    Rot3 r{};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) r[a][b] = full[kPlanar[a]][kPlanar[b]];
    return r;
  }

  void analyze(const Grid& g) {
    grid_ = &g;
    for (std::size_t k = 0; k < 5; ++k) {
      nodes_[k].clear();
      index_[k].assign(g.size(), -1);
      for (std::size_t p = 0; p < g.size(); ++p)
        if ((g.free_mask(p) >> k) & 1u) {
          index_[k][p] = static_cast<int>(nodes_[k].size());
          nodes_[k].push_back(p);
        }
      analyzed_[k] = false;
    }
  }

  const Grid* grid_ = nullptr;
  std::array<std::vector<std::size_t>, 5> nodes_;
  std::array<std::vector<int>, 5> index_;
  std::array<Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>>, 5> llt_;
  std::array<bool, 5> analyzed_{};
  std::vector<Rot3> rot_;
};

struct Preconditioners {
  Preconditioner kind = Preconditioner::slot_cholesky;
  BlockJacobi jacobi;
  SlotCholesky slots;
  double factored_dt = -1.0;
  bool stale = true;

  void factor(const FieldArray& f, double dt, double pot_scale, const std::vector<Mat5>* hc) {
    if (kind == Preconditioner::block_jacobi)
      jacobi.factor(*f.grid, 1.0 / dt, pot_scale, hc);
    else
      slots.factor(f, 1.0 / dt, pot_scale, hc);
    factored_dt = dt;
    stale = false;
  }
  void apply(const Vec& r, Vec& z) const {
    if (kind == Preconditioner::block_jacobi)
      jacobi.apply(r, z);
    else
      slots.apply(r, z);
  }
};

struct CgResult {
  int iterations = 0;
  bool negative_curvature = false;
};

// Preconditioned CG started from zero; stops at negative curvature and returns the
// current iterate (still a descent direction).
CgResult pcg(const Grid& g, const StepOperator& op, const Preconditioners& pre, const Vec& b, Vec& x, double rel_tol,
             int max_iter) {
  const std::size_t n = b.size();
  x.assign(n, QComponents{});
  Vec r = b, z, p, ap(n);
  pre.apply(r, z);
  p = z;
  double rz = dot(g, r, z);
  const double bnorm = std::sqrt(dot(g, b, b));
  CgResult res;
  if (bnorm == 0.0) return res;
  for (int it = 0; it < max_iter; ++it) {
    op.apply(p, ap);
    const double pap = dot(g, p, ap);
    res.iterations = it + 1;
    if (!(pap > 0.0)) {
      res.negative_curvature = true;
      if (it == 0) {
        // Fall back to the preconditioned residual, scaled by a unit step.
        x = z;
      }
      break;
    }
    const double alpha = rz / pap;
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    if (std::sqrt(dot(g, r, r)) <= rel_tol * bnorm) break;
    pre.apply(r, z);
    const double rz_new = dot(g, r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
#pragma omp parallel for schedule(static)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t k = 0; k < kComponents; ++k) p[q][k] = z[q][k] + beta * p[q][k];
  }
  return res;
}

}  // namespace

Scheme parse_scheme(const std::string& s) {
  if (s == "explicit_euler") return Scheme::explicit_euler;
  if (s == "imex") return Scheme::imex;
  if (s == "linearized") return Scheme::linearized;
  throw InvalidInput("unknown scheme '" + s + "'");
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::explicit_euler: return "explicit_euler";
    case Scheme::imex: return "imex";
    case Scheme::linearized: return "linearized";
  }
  return "unknown";
}

Preconditioner parse_preconditioner(const std::string& s) {
  if (s == "slot_cholesky") return Preconditioner::slot_cholesky;
  if (s == "block_jacobi") return Preconditioner::block_jacobi;
  throw InvalidInput("unknown preconditioner '" + s + "'");
}

std::string to_string(Preconditioner p) {
  return p == Preconditioner::block_jacobi ? "block_jacobi" : "slot_cholesky";
}

double explicit_dt_limit(const Grid& grid, double xi) {
  const double h = grid.min_spacing();
  return std::min(h * h / 8.0, xi * xi / 20.0);
}

RelaxResult relax(FieldArray field, double xi, const SolveOptions& opts) {
  if (!(xi > 0.0)) throw InvalidInput("correlation length must be positive");
  if (!field.grid) throw InvalidInput("field has no grid");
  const Grid& g = *field.grid;
  if (opts.preflight) check_resolution(g, xi);
  if (!(opts.tol_residual >= 0.0) || opts.max_steps < 0) throw InvalidInput("invalid solver options");
  apply_boundary_conditions(field);

  const auto t0 = std::chrono::steady_clock::now();
  const double inv_xi2 = 1.0 / (xi * xi);
  const std::size_t n = g.size();

  double dt_cap = opts.dt_max;
  if (opts.scheme == Scheme::explicit_euler) dt_cap = std::min(dt_cap, explicit_dt_limit(g, xi));
  if (opts.scheme == Scheme::imex) dt_cap = std::min(dt_cap, 0.25 * xi * xi);
  double dt = opts.dt_initial > 0.0 ? opts.dt_initial : (opts.scheme == Scheme::linearized ? 1e-3 : dt_cap);
  dt = std::min(dt, dt_cap);

  SolveReport rep;
  double energy = total_energy(field, xi).total;
  Vec dE;
  kernels::energy_derivative(field, xi, dE);
  auto residual_of = [&](const Vec& d) {
    double r = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const std::uint8_t mask = g.free_mask(p);
      if (mask == 0) continue;
      const double im = 1.0 / g.mass(p);
      for (std::size_t k = 0; k < kComponents; ++k)
        if ((mask >> k) & 1u) r = std::max(r, std::abs(d[p][k]) * im);
    }
    return r;
  };
  double residual = residual_of(dE);
  rep.energy_history.push_back(energy);

  std::vector<Mat5> hess(n), hess_clipped(n);
  auto refresh_hessians = [&]() {
#pragma omp parallel for schedule(dynamic, 256)
    for (std::size_t p = 0; p < n; ++p) {
      if (g.free_mask(p) == 0) continue;
      hess[p] = potential_hessian(field[p]);
      hess_clipped[p] = clip_negative(hess[p]);
    }
  };

  Preconditioners pre;
  pre.kind = opts.preconditioner;
  int last_iters = 0;
  FieldArray trial = field;
  Vec delta, rhs(n);

  while (residual > opts.tol_residual && rep.steps < opts.max_steps) {
    const bool lin = opts.scheme == Scheme::linearized;
    if (lin) refresh_hessians();
    int iters = 0;
    if (opts.scheme == Scheme::explicit_euler) {
      delta.resize(n);
      for (std::size_t p = 0; p < n; ++p) {
        const double s = g.free_mask(p) ? -dt / g.mass(p) : 0.0;
        delta[p] = s * dE[p];
      }
    } else {
      StepOperator op{&g, 1.0 / dt, lin ? inv_xi2 : 0.0, &hess};
      const double ratio = pre.factored_dt > 0.0 ? dt / pre.factored_dt : 0.0;
      // The block preconditioner is cheap enough to rebuild every step; the
      // sparse factorization is reused while it keeps CG short.
      const bool refactor = pre.stale || last_iters > 40 || ratio > 4.0 || ratio < 0.25 ||
                            (lin && opts.preconditioner == Preconditioner::block_jacobi);
      if (refactor) pre.factor(field, dt, lin ? inv_xi2 : 0.0, &hess_clipped);
      for (std::size_t p = 0; p < n; ++p) rhs[p] = -1.0 * dE[p];
      const CgResult cg = pcg(g, op, pre, rhs, delta, opts.cg_rel_tol, opts.cg_max_iter);
      iters = cg.iterations;
      rep.cg_iterations += iters;
    }
    last_iters = iters;

    for (std::size_t p = 0; p < n; ++p) {
      const std::uint8_t mask = g.free_mask(p);
      trial[p] = field[p];
      if (mask == 0) continue;
      for (std::size_t k = 0; k < kComponents; ++k)
        if ((mask >> k) & 1u) trial[p][k] += delta[p][k];
    }
    const double e_new = total_energy(trial, xi).total;
    const double slack = 1e-12 * std::abs(energy);
    if (std::isfinite(e_new) && e_new <= energy + slack) {
      std::swap(field.q, trial.q);
      energy = e_new;
      kernels::energy_derivative(field, xi, dE);
      residual = residual_of(dE);
      ++rep.steps;
      rep.energy_history.push_back(energy);
      if (opts.on_step) opts.on_step(rep.steps, energy, residual, dt, iters);
      if (opts.checkpoint_every > 0 && opts.on_checkpoint && rep.steps % opts.checkpoint_every == 0)
        opts.on_checkpoint(field, rep.steps);
      dt = std::min(dt * opts.dt_growth, dt_cap);
    } else {
      ++rep.rejected;
      dt *= 0.5;
      if (dt < 1e-16 * std::max(1.0, dt_cap) || dt < 1e-300) {
        rep.residual = residual;
        throw SolverFailure("time step underflow at step " + std::to_string(rep.steps) + " (energy " +
                            std::to_string(energy) + ", residual " + std::to_string(residual) + ")");
      }
    }
  }
  rep.residual = residual;
  rep.converged = residual <= opts.tol_residual;
  rep.final_dt = dt;
  rep.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(field), std::move(rep)};
}

std::vector<SweepPoint> continuation_sweep(const std::vector<double>& xi_list, const FieldArray& seed, double xi0,
                                           const SolveOptions& opts, const std::function<void(const SweepPoint&)>& on_point,
                                           std::vector<SweepPoint>* partial) {
  if (xi_list.empty()) throw InvalidInput("empty xi list");
  for (std::size_t k = 0; k < xi_list.size(); ++k) {
    if (!(xi_list[k] > 0.0)) throw InvalidInput("xi must be positive");
    if (k > 0 && !(xi_list[k] < xi_list[k - 1])) throw InvalidInput("xi list must be strictly descending");
  }
  if (xi0 < xi_list.front()) throw InvalidInput("seed correlation length must not be below the first xi");
  std::vector<SweepPoint> out;
  FieldArray current = seed;
  for (double xi : xi_list) {
    try {
      RelaxResult r = relax(current, xi, opts);
      SweepPoint pt{xi, r.field, std::move(r.report), total_energy(r.field, xi)};
      current = std::move(r.field);
      if (on_point) on_point(pt);
      out.push_back(std::move(pt));
    } catch (...) {
      if (partial) *partial = out;
      throw;
    }
  }
  return out;
}

}  // namespace ldg
