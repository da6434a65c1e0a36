#pragma once

#include <span>
#include <vector>

#include "hull_lab/errors.hpp"
#include "hull_lab/vec2.hpp"

namespace hull_lab::geometry {

// Finite point set in R^dim. Coordinates must be finite.
struct PointSet {
  int dim = 0;
  std::vector<std::vector<double>> points;

  PointSet(int d, std::vector<std::vector<double>> pts);
  static PointSet plane(const std::vector<Vec2>& pts);
  std::size_t size() const { return points.size(); }
};

// 2D convex hull polygon of a point set. Vertices are counterclockwise and
// strictly convex; degenerate inputs give a 1-vertex (point) or 2-vertex
// (segment) polygon.
struct HullRegion {
  PointSet source;
  std::vector<Vec2> hull_vertices;
  double tolerance = 0.0;
};

// Certifies that a query point lies outside a hull: every hull point b has
// <direction, b> >= threshold while the query q has <direction, q> <=
// threshold - margin. direction has unit norm.
struct SeparationWitness {
  std::vector<double> direction;
  double threshold = 0.0;
  double margin = 0.0;
};

struct HullProjection {
  double distance = 0.0;            // within tol of dist(q, conv(points))
  std::vector<double> nearest;      // certified primal point in the hull
  double gap = 0.0;                 // final Frank-Wolfe duality gap
  int iterations = 0;
};

HullRegion convex_hull_2d(const PointSet& ps);

// Frank-Wolfe with away steps on min |q - sum_i w_i b_i|^2 over the simplex.
HullProjection project_to_hull(std::span<const double> q, const PointSet& ps, double tol);
double hull_distance(std::span<const double> q, const PointSet& ps, double tol);

// hull_distance-based membership; in 2D cross-checked against the polygon
// test away from the hull boundary.
bool contains(std::span<const double> q, const PointSet& ps, double tol);

SeparationWitness separate(std::span<const double> q, const PointSet& ps, double tol);

// Polygon helpers. signed_polygon_margin is positive inside (and equals the
// distance to the boundary there), negative outside.
double signed_polygon_margin(Vec2 q, std::span<const Vec2> poly);
double polygon_boundary_distance(Vec2 q, std::span<const Vec2> poly);
bool point_in_convex_polygon(Vec2 q, std::span<const Vec2> poly, double tol);

}  // namespace hull_lab::geometry
