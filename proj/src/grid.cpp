#include "hull_lab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hull_lab::grid {

namespace {

std::string point_str(Vec2 p) {
  std::ostringstream os;
  os.precision(12);
  os << "(" << p.x << ", " << p.y << ")";
  return os.str();
}

// Root of mask along the segment [inside, outside]; mask(inside) > 0 >= mask(outside).
Vec2 bisect_boundary(const Expr& mask, Vec2 inside, Vec2 outside) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Vec2 p = inside + mid * (outside - inside);
    if (mask.eval(p.x, p.y) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return inside + 0.5 * (lo + hi) * (outside - inside);
}

}  // namespace

double GridDomain::distance_to_boundary(Vec2 p) const {
  double d = std::numeric_limits<double>::infinity();
  for (const Vec2& b : boundary_samples) d = std::min(d, dist(p, b));
  return d;
}

GridDomain build_grid(double x_min, double x_max, double y_min, double y_max, int nx, int ny,
                      const Expr& mask) {
  if (nx < 3 || ny < 3) throw Error("grid resolution must be at least 3x3");
  if (!(x_max > x_min) || !(y_max > y_min)) throw Error("degenerate bounding box");

  GridDomain dom;
  dom.x_min = x_min;
  dom.x_max = x_max;
  dom.y_min = y_min;
  dom.y_max = y_max;
  dom.nx = nx;
  dom.ny = ny;
  dom.dx = (x_max - x_min) / (nx - 1);
  dom.dy = (y_max - y_min) / (ny - 1);
  dom.mask = mask;

  const int n = nx * ny;
  std::vector<double> mv(n);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Vec2 p = {x_min + i * dom.dx, y_min + j * dom.dy};
      const double v = mask.eval(p.x, p.y);
      if (std::isnan(v))
        throw EvalError("mask evaluates to NaN at node " + point_str(p), p.x, p.y);
      mv[j * nx + i] = v;
    }

  dom.kind.assign(n, NodeKind::exterior);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int id = j * nx + i;
      const bool on_frame = (i == 0 || j == 0 || i == nx - 1 || j == ny - 1);
      if (!on_frame && mv[id] > 0.0) {
        dom.kind[id] = NodeKind::interior;
        dom.interior.push_back(id);
      } else if ((on_frame && mv[id] >= 0.0) || (!on_frame && mv[id] == 0.0)) {
        // Frame nodes of the masked region and lattice nodes that fall
        // exactly on the mask's zero curve are boundary samples.
        dom.kind[id] = NodeKind::boundary;
        dom.boundary_lattice.push_back(id);
      }
    }

  if (dom.interior.empty()) throw EmptyDomainError("mask selects no interior nodes");

  for (int id : dom.boundary_lattice) dom.boundary_samples.push_back(dom.at(id));

  // Bisection points where lattice edges cross the mask's zero curve.
  auto try_edge = [&](int i0, int j0, int i1, int j1) {
    const int a = j0 * nx + i0, b = j1 * nx + i1;
    if (dom.kind[a] == NodeKind::interior && dom.kind[b] == NodeKind::exterior)
      dom.boundary_samples.push_back(bisect_boundary(mask, dom.at(a), dom.at(b)));
    else if (dom.kind[b] == NodeKind::interior && dom.kind[a] == NodeKind::exterior)
      dom.boundary_samples.push_back(bisect_boundary(mask, dom.at(b), dom.at(a)));
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) try_edge(i, j, i + 1, j);
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i < nx; ++i) try_edge(i, j, i, j + 1);

  if (dom.boundary_samples.empty())
    throw EmptyBoundaryError("domain has an empty boundary");

  dom.boundary_dist.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (int id : dom.boundary_lattice) dom.boundary_dist[id] = 0.0;
  for (int id : dom.interior) dom.boundary_dist[id] = dom.distance_to_boundary(dom.at(id));
  return dom;
}

GridDomain build_grid_box(double x_min, double x_max, double y_min, double y_max, int nx, int ny) {
  return build_grid(x_min, x_max, y_min, y_max, nx, ny, Expr::constant(1.0));
}

Collar make_collar(const GridDomain& dom, double width) {
  if (width <= 0.0) throw Error("collar width must be positive");
  Collar c;
  c.width = width;
  for (int id : dom.interior)
    if (dom.boundary_dist[id] < width) c.nodes.push_back(id);
  return c;
}

std::vector<double> eval_scalar(const FieldExpr& f, std::span<const Vec2> pts) {
  if (f.output_dim() != 1) throw ArityError("scalar evaluation of a vector field");
  std::vector<double> out;
  out.reserve(pts.size());
  for (const Vec2& p : pts) {
    const double v = f.component(0).eval(p.x, p.y);
    if (!std::isfinite(v))
      throw EvalError("field evaluates non-finitely at node " + point_str(p), p.x, p.y);
    out.push_back(v);
  }
  return out;
}

std::vector<Vec2> eval_vec2(const FieldExpr& f, std::span<const Vec2> pts) {
  if (f.output_dim() != 2) throw ArityError("vector evaluation of a scalar field");
  std::vector<Vec2> out;
  out.reserve(pts.size());
  for (const Vec2& p : pts) {
    const Vec2 v = {f.component(0).eval(p.x, p.y), f.component(1).eval(p.x, p.y)};
    if (!std::isfinite(v.x) || !std::isfinite(v.y))
      throw EvalError("field evaluates non-finitely at node " + point_str(p), p.x, p.y);
    out.push_back(v);
  }
  return out;
}

JacobianSample jacobian(const FieldExpr& f, Vec2 p) {
  if (f.output_dim() != 2) throw ArityError("jacobian requires a two-component field");
  JacobianSample s;
  s.point = p;
  s.source = JacobianSample::Source::analytic;
  s.m[0][0] = f.component(0).dx().eval(p.x, p.y);
  s.m[0][1] = f.component(0).dy().eval(p.x, p.y);
  s.m[1][0] = f.component(1).dx().eval(p.x, p.y);
  s.m[1][1] = f.component(1).dy().eval(p.x, p.y);
  return s;
}

JacobianSample jacobian_fd(const FieldExpr& f, const GridDomain& dom, Vec2 p, double h_step) {
  if (f.output_dim() != 2) throw ArityError("jacobian requires a two-component field");
  if (h_step <= 0.0) throw Error("finite-difference step must be positive");
  if (dom.distance_to_boundary(p) < h_step)
    throw StencilError("finite-difference stencil exits the domain at " + point_str(p));
  JacobianSample s;
  s.point = p;
  s.source = JacobianSample::Source::finite_difference;
  for (int c = 0; c < 2; ++c) {
    const Expr& comp = f.component(c);
    s.m[c][0] = (comp.eval(p.x + h_step, p.y) - comp.eval(p.x - h_step, p.y)) / (2.0 * h_step);
    s.m[c][1] = (comp.eval(p.x, p.y + h_step) - comp.eval(p.x, p.y - h_step)) / (2.0 * h_step);
  }
  return s;
}

namespace {

// One axis of the nodal gradient: central where both neighbours carry
// samples, one-sided second order toward the domain otherwise.
double axis_derivative(std::span<const double> u, const GridDomain& dom, int i, int j, bool x_axis) {
  const double h = x_axis ? dom.dx : dom.dy;
  auto valid = [&](int ii, int jj) {
    return ii >= 0 && jj >= 0 && ii < dom.nx && jj < dom.ny &&
           dom.kind[dom.index(ii, jj)] != NodeKind::exterior;
  };
  auto val = [&](int ii, int jj) { return u[dom.index(ii, jj)]; };
  const int si = x_axis ? 1 : 0;
  const int sj = x_axis ? 0 : 1;
  if (valid(i + si, j + sj) && valid(i - si, j - sj))
    return (val(i + si, j + sj) - val(i - si, j - sj)) / (2.0 * h);
  if (valid(i + si, j + sj) && valid(i + 2 * si, j + 2 * sj))
    return (-3.0 * val(i, j) + 4.0 * val(i + si, j + sj) - val(i + 2 * si, j + 2 * sj)) / (2.0 * h);
  if (valid(i - si, j - sj) && valid(i - 2 * si, j - 2 * sj))
    return (3.0 * val(i, j) - 4.0 * val(i - si, j - sj) + val(i - 2 * si, j - 2 * sj)) / (2.0 * h);
  throw StencilError("insufficient stencil for nodal gradient");
}

}  // namespace

Vec2 gradient_fd(std::span<const double> samples, const GridDomain& dom, int node) {
  if (samples.size() != static_cast<std::size_t>(dom.nx * dom.ny))
    throw Error("sample array does not match the grid");
  if (dom.kind[node] == NodeKind::exterior)
    throw StencilError("gradient requested at an exterior node");
  const int i = dom.ix(node), j = dom.iy(node);
  return {axis_derivative(samples, dom, i, j, true), axis_derivative(samples, dom, i, j, false)};
}

double lipschitz_estimate(const FieldExpr& f, const GridDomain& dom) {
  std::vector<Expr> partials;
  for (int c = 0; c < f.output_dim(); ++c) {
    partials.push_back(f.component(c).dx());
    partials.push_back(f.component(c).dy());
  }
  double best = 0.0;
  std::size_t finite = 0, total = 0;
  auto visit = [&](Vec2 p) {
    double frob2 = 0.0;
    bool ok = true;
    for (const Expr& d : partials) {
      const double v = d.eval(p.x, p.y);
      if (!std::isfinite(v)) {
        ok = false;
        break;
      }
      frob2 += v * v;
    }
    ++total;
    if (ok) {
      ++finite;
      best = std::max(best, std::sqrt(frob2));
    }
  };
  for (int id : dom.interior) visit(dom.at(id));
  for (const Vec2& p : dom.boundary_samples) visit(p);
  if (finite == 0) throw Error("field has no finite derivatives on the domain");
  (void)total;
  return best;
}

}  // namespace hull_lab::grid
