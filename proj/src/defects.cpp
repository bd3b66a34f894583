#include "ldg/defects.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include "ldg/errors.hpp"

namespace ldg {
namespace {

constexpr double kPi = std::numbers::pi;

double dist(const Point2& a, const Point2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

// Smallest ball containing two balls.
Ball enclose(const Ball& a, const Ball& b) {
  const double d = dist(a.center, b.center);
  if (d + b.radius <= a.radius) return a;
  if (d + a.radius <= b.radius) return b;
  const double R = 0.5 * (d + a.radius + b.radius);
  const double t = (R - a.radius) / d;
  return {{a.center[0] + t * (b.center[0] - a.center[0]), a.center[1] + t * (b.center[1] - a.center[1])}, R};
}

std::vector<Ball> merge_ball_list(std::vector<Ball> balls) {
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < balls.size() && !merged; ++i)
      for (std::size_t j = i + 1; j < balls.size() && !merged; ++j)
        if (dist(balls[i].center, balls[j].center) <= balls[i].radius + balls[j].radius) {
          balls[i] = enclose(balls[i], balls[j]);
          balls.erase(balls.begin() + static_cast<std::ptrdiff_t>(j));
          merged = true;
        }
  }
  return balls;
}

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 director_at(const FieldArray& field, double rho, double z, double f_max) {
  const QComponents q = sample(field, rho, z);
  if (!(potential(q) < f_max)) throw BadLoop("loop point (" + std::to_string(rho) + ", " + std::to_string(z) +
                                             ") lies in the bad set");
  try {
    return project_uniaxial(q).n;
  } catch (const ProjectionUndefined&) {
    throw BadLoop("no director at loop point (" + std::to_string(rho) + ", " + std::to_string(z) + ")");
  }
}

double theta0(double r) { return 0.5 * kPi + std::asin(std::min(1.0, 0.5 * r)); }

}  // namespace

const char* to_string(Orientability o) {
  switch (o) {
    case Orientability::orientable:
      return "orientable";
    case Orientability::nonorientable:
      return "nonorientable";
    case Orientability::unknown:
      return "unknown";
  }
  return "unknown";
}

const char* to_string(DefectKind k) { return k == DefectKind::ring ? "ring" : "axis_point"; }

std::vector<std::size_t> bad_set(const FieldArray& field, double eta) {
  if (!(eta > 0.0)) throw InvalidInput("bad-set threshold must be positive");
  std::vector<std::size_t> out;
  const Grid& g = *field.grid;
  for (std::size_t p = 0; p < g.size(); ++p)
    if (g.has_node_terms(p) && potential(field[p]) > eta) out.push_back(p);
  return out;
}

std::vector<Ball> merge_balls(const std::vector<Point2>& points, double r0) {
  if (!(r0 > 0.0)) throw InvalidInput("ball radius must be positive");
  std::vector<Ball> balls;
  balls.reserve(points.size());
  for (const auto& p : points) balls.push_back({p, r0});
  return merge_ball_list(std::move(balls));
}

Orientability loop_orientability(const FieldArray& field, const Point2& center, double radius,
                                 const LoopOptions& opts) {
  if (!(radius > 0.0)) throw InvalidInput("loop radius must be positive");
  const double f_max = 2.0 * opts.eta;
  for (int n = std::max(opts.samples, 8); n <= opts.max_samples; n *= 2) {
    const Vec3 first = director_at(field, center[0] + radius, center[1], f_max);
    Vec3 prev = first;
    bool ok = true;
    for (int k = 1; k <= n && ok; ++k) {
      const double t = 2.0 * kPi * k / n;
      Vec3 cur = k == n ? first : director_at(field, center[0] + radius * std::cos(t), center[1] + radius * std::sin(t), f_max);
      if (k == n) {
        const double d = dot3(cur, prev);
        if (std::abs(d) <= opts.dot_gate) {
          ok = false;
          break;
        }
        return d < 0.0 ? Orientability::nonorientable : Orientability::orientable;
      }
      const double d = dot3(cur, prev);
      if (std::abs(d) <= opts.dot_gate) ok = false;
      if (d < 0.0)
        for (double& c : cur) c = -c;
      prev = cur;
    }
  }
  throw ResolutionError("director not resolved along the loop with " + std::to_string(opts.max_samples) +
                        " samples");
}

int ring_charge(const FieldArray& field, double delta, int samples, double in_plane_tol) {
  if (!(delta > 0.0 && delta < 0.5)) throw InvalidInput("ring_charge needs 0 < delta < 1/2");
  if (samples < 2) throw InvalidInput("ring_charge needs at least two samples");
  const double t0 = theta0(delta);
  double phase = 2.0 * t0 - kPi;
  for (int k = 0; k <= samples; ++k) {
    const double t = t0 * (1.0 - static_cast<double>(k) / samples);
    const QComponents q = sample(field, 1.0 + delta * std::cos(t), delta * std::sin(t));
    if (std::abs(q[2]) > in_plane_tol || std::abs(q[4]) > in_plane_tol)
      throw NotApplicable("field is not in-plane on the charge loop");
    Vec3 n;
    try {
      n = project_uniaxial(q).n;
    } catch (const ProjectionUndefined&) {
      throw NotApplicable("charge loop crosses a point without director");
    }
    // Representative of the director angle (defined mod pi) nearest the previous one.
    const double raw = std::atan2(n[2], n[0]);
    const double cand = raw + kPi * std::round((phase - raw) / kPi);
    if (std::abs(cand - phase) > 0.25 * kPi)
      throw ResolutionError("phase increment above pi/4 along the charge loop");
    phase = cand;
  }
  const double s = std::sin(phase);
  if (s == 0.0) throw NotApplicable("director is horizontal on the equatorial plane");
  return s > 0.0 ? 1 : -1;
}

std::vector<DefectCluster> locate_defects(const FieldArray& field, double xi, const LocateOptions& opts) {
  if (!(xi > 0.0)) throw InvalidInput("xi must be positive");
  const Grid& g = *field.grid;
  const std::vector<std::size_t> bad = bad_set(field, opts.eta);
  const std::size_t nr = g.n_rho(), nz = g.n_z();
  std::vector<int> label(g.size(), -1);
  std::vector<char> is_bad(g.size(), 0);
  for (std::size_t p : bad) is_bad[p] = 1;

  struct Component {
    std::vector<std::size_t> nodes;
  };
  std::vector<Component> comps;
  for (std::size_t seed : bad) {
    if (label[seed] >= 0) continue;
    const int id = static_cast<int>(comps.size());
    comps.emplace_back();
    std::deque<std::size_t> queue{seed};
    label[seed] = id;
    while (!queue.empty()) {
      const std::size_t p = queue.front();
      queue.pop_front();
      comps[id].nodes.push_back(p);
      const long i = static_cast<long>(p % nr), j = static_cast<long>(p / nr);
      for (long dj = -1; dj <= 1; ++dj)
        for (long di = -1; di <= 1; ++di) {
          const long a = i + di, b = j + dj;
          if (a < 0 || b < 0 || a >= static_cast<long>(nr) || b >= static_cast<long>(nz)) continue;
          const std::size_t q = g.index(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
          if (is_bad[q] && label[q] < 0) {
            label[q] = id;
            queue.push_back(q);
          }
        }
    }
  }

  // One covering ball per component.
  auto local_h = [&](std::size_t p) {
    const std::size_t i = p % nr, j = p / nr;
    const double hr = g.rho()[std::min(i + 1, nr - 1)] - g.rho()[i > 0 ? i - 1 : 0];
    const double hz = g.z()[std::min(j + 1, nz - 1)] - g.z()[j > 0 ? j - 1 : 0];
    return 0.5 * std::max(hr, hz);
  };
  const bool half = g.spec().half_plane;
  std::vector<Ball> balls;
  for (const auto& c : comps) {
    double w = 0.0, cr = 0.0, cz = 0.0, h = 0.0;
    bool touches_mirror = false;
    for (std::size_t p : c.nodes) {
      const double m = g.mass(p) * potential(field[p]);
      w += m;
      cr += m * g.rho_at(p);
      cz += m * g.z_at(p);
      h = std::max(h, local_h(p));
      touches_mirror = touches_mirror || g.cls(p) == NodeClass::mirror_line;
    }
    Point2 ctr{cr / w, cz / w};
    if (half && touches_mirror) ctr[1] = 0.0;  // centroid of the component and its mirror image
    double rad = 0.0;
    for (std::size_t p : c.nodes) rad = std::max(rad, dist(ctr, {g.rho_at(p), g.z_at(p)}));
    balls.push_back({ctr, rad + (opts.r0 > 0.0 ? opts.r0 : 2.0 * h)});
  }
  balls = merge_ball_list(std::move(balls));

  std::vector<DefectCluster> out;
  const double ixi2 = (half ? 2.0 : 1.0) / (xi * xi);  // mass over the whole cross-section, like the energy
  for (const Ball& b : balls) {
    DefectCluster c;
    c.center = b.center;
    c.radius = b.radius;
    for (std::size_t p : bad)
      if (dist(b.center, {g.rho_at(p), g.z_at(p)}) <= b.radius) {
        c.mass += ixi2 * potential(field[p]) * g.mass(p);
        ++c.n_nodes;
      }
    c.kind = (c.center[0] < opts.axis_threshold && std::abs(c.center[1]) > 1.0) ? DefectKind::axis_point
                                                                                 : DefectKind::ring;
    for (double factor : {2.0, 3.0}) {
      try {
        c.orientability = loop_orientability(field, c.center, factor * b.radius, opts.loop);
        break;
      } catch (const Error&) {
        c.orientability = Orientability::unknown;
      }
    }
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const DefectCluster& a, const DefectCluster& b) { return a.mass > b.mass; });
  return out;
}

std::vector<LoopEnergySample> loop_energy_profile(const FieldArray& field, const Point2& center,
                                                  const std::vector<double>& radii, int samples) {
  if (samples < 8) throw InvalidInput("loop_energy_profile needs at least 8 samples");
  std::vector<LoopEnergySample> out;
  for (double r : radii) {
    if (!(r > 0.0)) throw InvalidInput("loop radius must be positive");
    const double ds = 2.0 * kPi * r / samples;
    QComponents first = sample(field, center[0] + r, center[1]);
    QComponents prev = first;
    double sum = 0.0;
    for (int k = 1; k <= samples; ++k) {
      const double t = 2.0 * kPi * k / samples;
      const QComponents cur = k == samples ? first : sample(field, center[0] + r * std::cos(t), center[1] + r * std::sin(t));
      sum += (cur - prev).norm2() / ds;
      prev = cur;
    }
    out.push_back({r, r * sum});
  }
  return out;
}

}  // namespace ldg
