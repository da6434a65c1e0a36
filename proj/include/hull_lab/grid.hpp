#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hull_lab/errors.hpp"
#include "hull_lab/field_expr.hpp"
#include "hull_lab/vec2.hpp"

namespace hull_lab::grid {

enum class NodeKind : unsigned char { exterior, boundary, interior };

// Uniform lattice over a bounding box with a mask expression selecting the
// open set: a point is inside iff mask > 0. Lattice nodes are classified
// interior / boundary / exterior; for curved masks the boundary is sampled
// on the true zero-level curve by bisection along crossing lattice edges.
struct GridDomain {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  int nx = 0, ny = 0;
  double dx = 0.0, dy = 0.0;
  Expr mask;

  std::vector<NodeKind> kind;           // row-major, index j*nx + i
  std::vector<int> interior;            // ascending flat indices
  std::vector<int> boundary_lattice;    // ascending flat indices
  std::vector<Vec2> boundary_samples;   // lattice boundary nodes + bisection points
  std::vector<double> boundary_dist;    // per lattice node; interior nodes only

  int index(int i, int j) const { return j * nx + i; }
  int ix(int flat) const { return flat % nx; }
  int iy(int flat) const { return flat / nx; }
  Vec2 at(int flat) const {
    return {x_min + ix(flat) * dx, y_min + iy(flat) * dy};
  }
  bool is_interior(int i, int j) const {
    return i >= 0 && j >= 0 && i < nx && j < ny && kind[index(i, j)] == NodeKind::interior;
  }
  double spacing() const { return std::max(dx, dy); }
  double distance_to_boundary(Vec2 p) const;
};

GridDomain build_grid(double x_min, double x_max, double y_min, double y_max, int nx, int ny,
                      const Expr& mask);
// Rectangle: every box point is inside, the frame is the boundary.
GridDomain build_grid_box(double x_min, double x_max, double y_min, double y_max, int nx, int ny);

// Interior nodes within distance `width` of the boundary. Narrower collars
// are subsets of wider ones.
struct Collar {
  double width = 0.0;
  std::vector<int> nodes;
};
Collar make_collar(const GridDomain& dom, double width);

// Checked evaluation over points in the closed domain; a non-finite value
// raises EvalError naming the offending node.
std::vector<double> eval_scalar(const FieldExpr& f, std::span<const Vec2> pts);
std::vector<Vec2> eval_vec2(const FieldExpr& f, std::span<const Vec2> pts);

struct JacobianSample {
  enum class Source : unsigned char { analytic, finite_difference };
  Vec2 point;
  double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  Source source = Source::analytic;
  double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
};

JacobianSample jacobian(const FieldExpr& f, Vec2 p);
JacobianSample jacobian_fd(const FieldExpr& f, const GridDomain& dom, Vec2 p, double h_step);

// O(dx^2) gradient of nodal samples: central at interior nodes, one-sided
// second order at lattice boundary nodes.
Vec2 gradient_fd(std::span<const double> samples, const GridDomain& dom, int node);

// Max Frobenius norm of the analytic Jacobian (gradient for scalars) over
// lattice nodes of the closed domain; nodes with non-finite derivatives are
// skipped so fields with isolated kinks remain usable.
double lipschitz_estimate(const FieldExpr& f, const GridDomain& dom);

}  // namespace hull_lab::grid
