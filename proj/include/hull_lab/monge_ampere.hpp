#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "hull_lab/grid.hpp"
#include "hull_lab/hull_property.hpp"

namespace hull_lab::monge_ampere {

using grid::FieldExpr;
using grid::GridDomain;

// Dirichlet problem u_xx u_yy - u_xy^2 = h with h >= 0. The pointwise
// Gauss-Seidel solver needs complete 9-point stencils at every interior
// node, which rectangular (mask-free) grids provide.
struct MAProblem {
  GridDomain dom;
  FieldExpr h;                          // scalar, h >= -1e-12 on the interior
  std::vector<double> boundary_values;  // full lattice array; read at boundary nodes
  std::vector<double> h_values;         // cached h at every lattice node (interior used)
};

MAProblem make_problem(GridDomain dom, FieldExpr h, const FieldExpr& boundary_expr);
MAProblem make_problem(GridDomain dom, FieldExpr h, std::vector<double> boundary_values);

struct MASolution {
  std::vector<double> u;  // full lattice array; boundary data exact
  int iterations = 0;     // symmetric sweeps
  double final_change = 0.0;
  double stop_tol = 0.0;        // tol_res passed to the solver
  double residual = 0.0;        // max interior |Dxx u Dyy u - (Dxy u)^2 - h|
  double convexity_defect = 0.0;  // min eigenvalue of the discrete Hessian
  bool converged = false;
  bool degenerate_clamped = false;
  std::vector<double> change_trace;  // max change per sweep (decimated)
};

// Local convex-branch root of (a1 - u)(a2 - u) = rhs: the root keeping both
// directional second differences nonnegative. Negative discriminant clamps
// to the degenerate midpoint root.
struct ConvexRoot {
  double value = 0.0;
  bool degenerate = false;
};
ConvexRoot convex_root(double a1, double a2, double rhs);

MASolution solve_ma(const MAProblem& prob, int max_iters, double tol_res);

double residual_ma(const std::vector<double>& u, const MAProblem& prob);

// Hull containment of the nodal gradient field: central differences at
// interior nodes, one-sided second order on the boundary.
hull_property::HullPropertyReport gradient_hull_check(const std::vector<double>& u,
                                                      const GridDomain& dom, double tol);
hull_property::HullPropertyReport verify_theorem5(const MASolution& sol, const MAProblem& prob,
                                                  double tol);

// Max gradient norm over lattice boundary nodes (for hull tolerances).
double max_boundary_gradient_norm(const std::vector<double>& u, const GridDomain& dom);

void write_solution_csv(const std::string& path, const MASolution& sol, const MAProblem& prob);
nlohmann::ordered_json convergence_trace_json(const MASolution& sol);

}  // namespace hull_lab::monge_ampere
