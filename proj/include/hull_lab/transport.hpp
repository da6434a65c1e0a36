#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "hull_lab/grid.hpp"

namespace hull_lab::transport {

using grid::Expr;
using grid::FieldExpr;
using grid::GridDomain;

// Exact solution u = F(beta) of beta_y u_x - beta_x u_y = 0, together with
// the companion alpha whose Jacobian pairing with beta must not vanish.
struct TransportInstance {
  Expr beta;
  Expr alpha;
  Expr profile;  // univariate F, parsed over "t"
  Expr u;        // F composed with beta
  GridDomain dom;
  double min_jacobian_margin = 0.0;  // min |alpha_x beta_y - alpha_y beta_x|
  double max_residual = 0.0;         // max |beta_y u_x - beta_x u_y|
};

TransportInstance make_instance(const Expr& beta, const Expr& alpha, const Expr& profile,
                                GridDomain dom);

struct MaxPrincipleReport {
  double interior_sup = 0.0, boundary_sup = 0.0;
  double interior_inf = 0.0, boundary_inf = 0.0;
  int sup_node = -1, inf_node = -1;               // interior attaining nodes
  int sup_sample = -1, inf_sample = -1;           // boundary attaining samples
  double sup_gap = 0.0;  // interior_sup - boundary_sup
  double inf_gap = 0.0;  // boundary_inf - interior_inf
  double tolerance = 0.0;
  bool passes = false;   // |sup_gap| <= tol and |inf_gap| <= tol
};

MaxPrincipleReport check_max_principle(const TransportInstance& inst, double tol);

// Runs the sup/inf comparison for u = F(beta) without requiring a companion
// alpha; used to show that fields with interior critical points can break
// the two-sided maximum principle.
struct CounterexampleReport {
  double min_grad_norm_beta = 0.0;
  int critical_node = -1;
  double interior_sup = 0.0, boundary_sup = 0.0;
  double interior_inf = 0.0, boundary_inf = 0.0;
  double sup_excess = 0.0;  // interior_sup - boundary_sup
  double inf_excess = 0.0;  // boundary_inf - interior_inf
  double tolerance = 0.0;
  bool max_principle_failed = false;
};

CounterexampleReport counterexample_probe(const Expr& beta, const Expr& profile,
                                          const GridDomain& dom, double tol);

// 2 dx scaled by the solution's Lipschitz estimate.
double default_tolerance(const TransportInstance& inst);

nlohmann::ordered_json to_json(const MaxPrincipleReport& r);
nlohmann::ordered_json to_json(const CounterexampleReport& r);

}  // namespace hull_lab::transport
