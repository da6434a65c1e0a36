#include "hull_lab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hull_lab::geometry {

PointSet::PointSet(int d, std::vector<std::vector<double>> pts) : dim(d), points(std::move(pts)) {
  if (dim < 1) throw DimensionMismatchError("point set dimension must be positive");
  if (points.empty()) throw Error("point set must contain at least one point");
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != dim)
      throw DimensionMismatchError("point with wrong coordinate count");
    for (double c : p)
      if (!std::isfinite(c)) throw Error("point set contains a non-finite coordinate");
  }
}

PointSet PointSet::plane(const std::vector<Vec2>& pts) {
  std::vector<std::vector<double>> raw;
  raw.reserve(pts.size());
  for (const Vec2& p : pts) raw.push_back({p.x, p.y});
  return PointSet(2, std::move(raw));
}

namespace {

double coordinate_scale(const PointSet& ps) {
  double s = 1.0;
  for (const auto& p : ps.points)
    for (double c : p) s = std::max(s, std::fabs(c));
  return s;
}

double cross3(Vec2 o, Vec2 a, Vec2 b) { return cross(a - o, b - o); }

}  // namespace

HullRegion convex_hull_2d(const PointSet& ps) {
  if (ps.dim != 2) throw DimensionMismatchError("convex_hull_2d requires dim = 2");
  const double eps = 1e-12 * coordinate_scale(ps);

  std::vector<Vec2> pts;
  pts.reserve(ps.size());
  for (const auto& p : ps.points) pts.push_back({p[0], p[1]});
  std::sort(pts.begin(), pts.end(),
            [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [eps](Vec2 a, Vec2 b) {
                          return std::fabs(a.x - b.x) <= eps && std::fabs(a.y - b.y) <= eps;
                        }),
            pts.end());

  std::vector<Vec2> hull;
  if (pts.size() <= 2) {
    hull = pts;
  } else {
    // Andrew's monotone chain; collinear intermediate points are dropped.
    std::vector<Vec2> chain(2 * pts.size());
    std::size_t k = 0;
    for (const Vec2& p : pts) {
      while (k >= 2 && cross3(chain[k - 2], chain[k - 1], p) <= eps) --k;
      chain[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
      while (k >= lower && cross3(chain[k - 2], chain[k - 1], *it) <= eps) --k;
      chain[k++] = *it;
    }
    chain.resize(k - 1);
    hull = std::move(chain);
  }
  return HullRegion{ps, std::move(hull), eps};
}

double signed_polygon_margin(Vec2 q, std::span<const Vec2> poly) {
  if (poly.empty()) return -std::numeric_limits<double>::infinity();
  if (poly.size() == 1) return -dist(q, poly[0]);
  if (poly.size() == 2) return -segment_distance(q, poly[0], poly[1]);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % poly.size()];
    const double len = dist(a, b);
    if (len == 0.0) continue;
    margin = std::min(margin, cross3(a, b, q) / len);
  }
  return margin;
}

double polygon_boundary_distance(Vec2 q, std::span<const Vec2> poly) {
  if (poly.empty()) return std::numeric_limits<double>::infinity();
  if (poly.size() == 1) return dist(q, poly[0]);
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i)
    d = std::min(d, segment_distance(q, poly[i], poly[(i + 1) % poly.size()]));
  return d;
}

bool point_in_convex_polygon(Vec2 q, std::span<const Vec2> poly, double tol) {
  return signed_polygon_margin(q, poly) >= -tol;
}

HullProjection project_to_hull(std::span<const double> q, const PointSet& ps, double tol) {
  if (static_cast<int>(q.size()) != ps.dim)
    throw DimensionMismatchError("query dimension does not match point set");
  if (tol <= 0.0) throw Error("tolerance must be positive");

  const int dim = ps.dim;
  const std::size_t n = ps.size();
  const auto& b = ps.points;

  // Termination: gap <= tol^2 makes the distance error at most tol; the
  // floor guards against demanding sub-roundoff gaps.
  double sq_scale = 1.0;
  for (double c : q) sq_scale += c * c;
  for (const auto& p : b) {
    double s = 1.0;
    for (double c : p) s += c * c;
    sq_scale = std::max(sq_scale, s);
  }
  const double gap_stop = std::max(tol * tol, 32.0 * std::numeric_limits<double>::epsilon() * sq_scale);

  std::vector<double> w(n, 0.0);
  std::vector<double> x(dim), g(dim);

  // Start from the point closest to q.
  std::size_t start = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double d2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double d = b[i][k] - q[k];
      d2 += d * d;
    }
    if (d2 < best) {
      best = d2;
      start = i;
    }
  }
  w[start] = 1.0;
  for (int k = 0; k < dim; ++k) x[k] = b[start][k];

  const int max_iters = 20000;
  double gap = 0.0;
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    for (int k = 0; k < dim; ++k) g[k] = x[k] - q[k];

    std::size_t fw = 0, away = start;
    double fw_val = std::numeric_limits<double>::infinity();
    double away_val = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      double dp = 0.0;
      for (int k = 0; k < dim; ++k) dp += g[k] * b[i][k];
      if (dp < fw_val) {
        fw_val = dp;
        fw = i;
      }
      if (w[i] > 0.0 && dp > away_val) {
        away_val = dp;
        away = i;
      }
    }
    double gx = 0.0;
    for (int k = 0; k < dim; ++k) gx += g[k] * x[k];
    gap = 2.0 * (gx - fw_val);
    if (gap <= gap_stop) break;

    const double fw_gain = gx - fw_val;
    const double away_gain = away_val - gx;
    const bool use_fw = fw_gain >= away_gain || w[away] >= 1.0;

    double dir_dot_g = 0.0, dir_norm2 = 0.0, gamma_max;
    std::vector<double> dir(dim);
    if (use_fw) {
      for (int k = 0; k < dim; ++k) dir[k] = b[fw][k] - x[k];
      gamma_max = 1.0;
    } else {
      for (int k = 0; k < dim; ++k) dir[k] = x[k] - b[away][k];
      gamma_max = w[away] / (1.0 - w[away]);
    }
    for (int k = 0; k < dim; ++k) {
      dir_dot_g += dir[k] * g[k];
      dir_norm2 += dir[k] * dir[k];
    }
    if (dir_norm2 == 0.0) break;
    double gamma = -dir_dot_g / dir_norm2;
    gamma = std::clamp(gamma, 0.0, gamma_max);
    if (gamma == 0.0) break;

    if (use_fw) {
      for (auto& wi : w) wi *= (1.0 - gamma);
      w[fw] += gamma;
    } else {
      for (auto& wi : w) wi *= (1.0 + gamma);
      w[away] -= gamma;
      if (gamma >= gamma_max || w[away] < 0.0) w[away] = 0.0;  // drop step
    }
    // Re-synthesize x from the weights; keeps roundoff from accumulating.
    for (int k = 0; k < dim; ++k) x[k] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i] == 0.0) continue;
      for (int k = 0; k < dim; ++k) x[k] += w[i] * b[i][k];
    }
  }

  double d2 = 0.0;
  for (int k = 0; k < dim; ++k) {
    const double d = x[k] - q[k];
    d2 += d * d;
  }
  return HullProjection{std::sqrt(d2), std::move(x), gap, iter};
}

double hull_distance(std::span<const double> q, const PointSet& ps, double tol) {
  return project_to_hull(q, ps, tol).distance;
}

bool contains(std::span<const double> q, const PointSet& ps, double tol) {
  if (tol <= 0.0) throw Error("tolerance must be positive");
  const double hd = hull_distance(q, ps, tol / 4.0);
  const bool inside = hd <= tol;
  if (ps.dim == 2) {
    const HullRegion hull = convex_hull_2d(ps);
    const double margin = signed_polygon_margin({q[0], q[1]}, hull.hull_vertices);
    // The two routes must agree away from the hull boundary.
    if (margin > tol && !inside)
      throw std::logic_error("hull membership cross-check failed (polygon in, distance out)");
    if (margin < -2.0 * tol && inside && hd > tol / 2.0)
      throw std::logic_error("hull membership cross-check failed (polygon out, distance in)");
  }
  return inside;
}

SeparationWitness separate(std::span<const double> q, const PointSet& ps, double tol) {
  if (tol <= 0.0) throw Error("tolerance must be positive");
  const HullProjection proj = project_to_hull(q, ps, tol / 4.0);
  if (proj.distance <= tol)
    throw NoSeparationError("query point is contained in the hull; no separating functional");

  const int dim = ps.dim;
  std::vector<double> dir(dim);
  for (int k = 0; k < dim; ++k) dir[k] = (proj.nearest[k] - q[k]) / proj.distance;

  double threshold = 0.0;
  for (int k = 0; k < dim; ++k) threshold += dir[k] * 0.5 * (proj.nearest[k] + q[k]);
  // Clamp so every generator satisfies <dir, b> >= threshold exactly.
  double tmin = std::numeric_limits<double>::infinity();
  for (const auto& p : ps.points) {
    double dp = 0.0;
    for (int k = 0; k < dim; ++k) dp += dir[k] * p[k];
    tmin = std::min(tmin, dp);
  }
  threshold = std::min(threshold, tmin);

  double dq = 0.0;
  for (int k = 0; k < dim; ++k) dq += dir[k] * q[k];
  const double margin = std::max(0.0, threshold - dq);
  return SeparationWitness{std::move(dir), threshold, margin};
}

}  // namespace hull_lab::geometry
