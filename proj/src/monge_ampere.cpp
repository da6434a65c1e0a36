#include "hull_lab/monge_ampere.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace hull_lab::monge_ampere {

namespace {

void require_full_stencils(const GridDomain& dom) {
  for (int id : dom.interior) {
    const int i = dom.ix(id), j = dom.iy(id);
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        const int nb = dom.index(i + di, j + dj);
        if (dom.kind[nb] == grid::NodeKind::exterior)
          throw Error("solver requires complete 9-point stencils; use a rectangular grid");
      }
  }
}

MAProblem finish_problem(GridDomain dom, FieldExpr h, std::vector<double> boundary_values) {
  if (h.output_dim() != 1) throw ArityError("h must be a scalar field");
  require_full_stencils(dom);

  MAProblem prob;
  prob.h_values.assign(dom.nx * dom.ny, 0.0);
  for (int id : dom.interior) {
    const Vec2 p = dom.at(id);
    const double hv = h.component(0).eval(p.x, p.y);
    if (!std::isfinite(hv))
      throw EvalError("h evaluates non-finitely inside the domain", p.x, p.y);
    if (hv < -1e-12) throw Error("h must be nonnegative on the interior");
    prob.h_values[id] = hv;
  }
  for (int id : dom.boundary_lattice)
    if (!std::isfinite(boundary_values[id])) throw Error("boundary data must be finite");

  prob.dom = std::move(dom);
  prob.h = std::move(h);
  prob.boundary_values = std::move(boundary_values);
  return prob;
}

}  // namespace

MAProblem make_problem(GridDomain dom, FieldExpr h, const FieldExpr& boundary_expr) {
  if (boundary_expr.output_dim() != 1) throw ArityError("boundary data must be scalar");
  std::vector<double> bv(dom.nx * dom.ny, 0.0);
  for (int id : dom.boundary_lattice) {
    const Vec2 p = dom.at(id);
    bv[id] = boundary_expr.component(0).eval(p.x, p.y);
  }
  return finish_problem(std::move(dom), std::move(h), std::move(bv));
}

MAProblem make_problem(GridDomain dom, FieldExpr h, std::vector<double> boundary_values) {
  if (boundary_values.size() != static_cast<std::size_t>(dom.nx * dom.ny))
    throw Error("boundary value array does not match the grid");
  return finish_problem(std::move(dom), std::move(h), std::move(boundary_values));
}

ConvexRoot convex_root(double a1, double a2, double rhs) {
  const double half_diff = 0.5 * (a1 - a2);
  const double disc = half_diff * half_diff + rhs;
  if (disc < 0.0) return {0.5 * (a1 + a2), true};
  return {0.5 * (a1 + a2) - std::sqrt(disc), false};
}

namespace {

// 5-point Laplace solve with the problem's boundary data; the convex-ish
// starting guess for the nonlinear sweeps.
void laplace_init(const MAProblem& prob, std::vector<double>& u) {
  const GridDomain& dom = prob.dom;
  double mean = 0.0;
  for (int id : dom.boundary_lattice) mean += u[id];
  mean /= static_cast<double>(dom.boundary_lattice.size());
  for (int id : dom.interior) u[id] = mean;

  const double wx = 1.0 / (dom.dx * dom.dx), wy = 1.0 / (dom.dy * dom.dy);
  const double denom = 2.0 * (wx + wy);
  std::vector<double> next(u);
  const int cap = 400000;
  for (int it = 0; it < cap; ++it) {
    double change = 0.0;
    for (int id : dom.interior) {
      const double v =
          (wx * (u[id - 1] + u[id + 1]) + wy * (u[id - dom.nx] + u[id + dom.nx])) / denom;
      change = std::max(change, std::fabs(v - u[id]));
      next[id] = v;
    }
    std::swap(u, next);
    if (change <= 1e-8) break;
  }
}

}  // namespace

MASolution solve_ma(const MAProblem& prob, int max_iters, double tol_res) {
  if (max_iters < 1) throw Error("max_iters must be positive");
  if (tol_res <= 0.0) throw Error("tol_res must be positive");
  const GridDomain& dom = prob.dom;
  const int nx = dom.nx;
  const double cross_scale = 1.0 / (4.0 * dom.dx * dom.dy);
  const double rhs_scale = 0.25 * dom.dx * dom.dx * dom.dy * dom.dy;

  MASolution sol;
  sol.stop_tol = tol_res;
  sol.u.assign(dom.nx * dom.ny, 0.0);
  for (int id : dom.boundary_lattice) sol.u[id] = prob.boundary_values[id];
  laplace_init(prob, sol.u);

  std::vector<double>& u = sol.u;
  const double stop = tol_res * dom.dx * dom.dy;
  bool clamped = false;

  auto update = [&](int id) {
    const double a1 = 0.5 * (u[id - 1] + u[id + 1]);
    const double a2 = 0.5 * (u[id - nx] + u[id + nx]);
    const double mixed =
        (u[id + nx + 1] - u[id + nx - 1] - u[id - nx + 1] + u[id - nx - 1]) * cross_scale;
    const ConvexRoot root =
        convex_root(a1, a2, (prob.h_values[id] + mixed * mixed) * rhs_scale);
    clamped = clamped || root.degenerate;
    const double delta = std::fabs(root.value - u[id]);
    u[id] = root.value;
    return delta;
  };

  int sweep = 0;
  double change = std::numeric_limits<double>::infinity();
  for (; sweep < max_iters; ++sweep) {
    change = 0.0;
    for (auto it = dom.interior.begin(); it != dom.interior.end(); ++it)
      change = std::max(change, update(*it));
    for (auto it = dom.interior.rbegin(); it != dom.interior.rend(); ++it)
      change = std::max(change, update(*it));
    if (sweep < 1000 || sweep % 64 == 0) sol.change_trace.push_back(change);
    if (change <= stop) {
      ++sweep;
      break;
    }
  }
  sol.iterations = sweep;
  sol.final_change = change;
  sol.converged = change <= stop;
  sol.degenerate_clamped = clamped;
  sol.residual = residual_ma(u, prob);

  double defect = std::numeric_limits<double>::infinity();
  for (int id : dom.interior) {
    const double dxx = (u[id + 1] - 2.0 * u[id] + u[id - 1]) / (dom.dx * dom.dx);
    const double dyy = (u[id + nx] - 2.0 * u[id] + u[id - nx]) / (dom.dy * dom.dy);
    const double dxy =
        (u[id + nx + 1] - u[id + nx - 1] - u[id - nx + 1] + u[id - nx - 1]) * cross_scale;
    const double mean = 0.5 * (dxx + dyy);
    const double rad = std::sqrt(0.25 * (dxx - dyy) * (dxx - dyy) + dxy * dxy);
    defect = std::min(defect, mean - rad);
  }
  sol.convexity_defect = defect;
  return sol;
}

double residual_ma(const std::vector<double>& u, const MAProblem& prob) {
  const GridDomain& dom = prob.dom;
  if (u.size() != static_cast<std::size_t>(dom.nx * dom.ny))
    throw Error("sample array does not match the grid");
  const int nx = dom.nx;
  const double cross_scale = 1.0 / (4.0 * dom.dx * dom.dy);
  double worst = 0.0;
  for (int id : dom.interior) {
    const double dxx = (u[id + 1] - 2.0 * u[id] + u[id - 1]) / (dom.dx * dom.dx);
    const double dyy = (u[id + nx] - 2.0 * u[id] + u[id - nx]) / (dom.dy * dom.dy);
    const double dxy =
        (u[id + nx + 1] - u[id + nx - 1] - u[id - nx + 1] + u[id - nx - 1]) * cross_scale;
    worst = std::max(worst, std::fabs(dxx * dyy - dxy * dxy - prob.h_values[id]));
  }
  return worst;
}

hull_property::HullPropertyReport gradient_hull_check(const std::vector<double>& u,
                                                      const GridDomain& dom, double tol) {
  std::vector<Vec2> interior_grads(dom.interior.size());
  for (std::size_t k = 0; k < dom.interior.size(); ++k)
    interior_grads[k] = grid::gradient_fd(u, dom, dom.interior[k]);
  std::vector<Vec2> boundary_grads(dom.boundary_lattice.size());
  for (std::size_t k = 0; k < dom.boundary_lattice.size(); ++k)
    boundary_grads[k] = grid::gradient_fd(u, dom, dom.boundary_lattice[k]);
  return hull_property::check_hull_property_points(interior_grads, dom.interior, boundary_grads,
                                                   tol, dom, hull_property::default_probe_family());
}

hull_property::HullPropertyReport verify_theorem5(const MASolution& sol, const MAProblem& prob,
                                                  double tol) {
  if (!sol.converged) throw std::invalid_argument("solution did not converge");
  if (sol.residual > 10.0 * std::max(sol.stop_tol, 1e-12))
    throw std::invalid_argument("solution residual is too large for verification");
  return gradient_hull_check(sol.u, prob.dom, tol);
}

double max_boundary_gradient_norm(const std::vector<double>& u, const GridDomain& dom) {
  double best = 0.0;
  for (int id : dom.boundary_lattice) best = std::max(best, norm(grid::gradient_fd(u, dom, id)));
  return best;
}

void write_solution_csv(const std::string& path, const MASolution& sol, const MAProblem& prob) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open CSV output file: " + path);
  out << "x,y,u,u_x,u_y\n";
  out.precision(17);
  const GridDomain& dom = prob.dom;
  auto row = [&](int id) {
    const Vec2 p = dom.at(id);
    const Vec2 g = grid::gradient_fd(sol.u, dom, id);
    out << p.x << "," << p.y << "," << sol.u[id] << "," << g.x << "," << g.y << "\n";
  };
  for (int id : dom.boundary_lattice) row(id);
  for (int id : dom.interior) row(id);
}

nlohmann::ordered_json convergence_trace_json(const MASolution& sol) {
  nlohmann::ordered_json j;
  j["iterations"] = sol.iterations;
  j["final_change"] = sol.final_change;
  j["stop_tol"] = sol.stop_tol;
  j["residual"] = sol.residual;
  j["converged"] = sol.converged;
  j["convexity_defect"] = sol.convexity_defect;
  j["degenerate_clamped"] = sol.degenerate_clamped;
  j["change_trace"] = sol.change_trace;
  return j;
}

}  // namespace hull_lab::monge_ampere
