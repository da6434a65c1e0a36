#include "hull_lab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hull_lab::transport {

TransportInstance make_instance(const Expr& beta, const Expr& alpha, const Expr& profile,
                                GridDomain dom) {
  TransportInstance inst;
  inst.beta = beta;
  inst.alpha = alpha;
  inst.profile = profile;
  inst.u = profile.substitute(beta, beta);

  const Expr jac = alpha.dx() * beta.dy() - alpha.dy() * beta.dx();
  const Expr residual = beta.dy() * inst.u.dx() - beta.dx() * inst.u.dy();

  double min_margin = std::numeric_limits<double>::infinity();
  double max_res = 0.0;
  for (int id : dom.interior) {
    const Vec2 p = dom.at(id);
    const double jv = jac.eval(p.x, p.y);
    if (!std::isfinite(jv) || std::fabs(jv) < 1e-8)
      throw HypothesisError("alpha_x beta_y - alpha_y beta_x vanishes (or nearly so) at an "
                            "interior node",
                            p.x, p.y);
    min_margin = std::min(min_margin, std::fabs(jv));
    const double rv = residual.eval(p.x, p.y);
    if (!std::isfinite(rv) || std::fabs(rv) > 1e-10)
      throw std::logic_error("chain-rule residual of the constructed solution is not negligible");
    max_res = std::max(max_res, std::fabs(rv));
  }
  inst.min_jacobian_margin = min_margin;
  inst.max_residual = max_res;
  inst.dom = std::move(dom);
  return inst;
}

namespace {

struct Extrema {
  double interior_sup, interior_inf;
  double boundary_sup, boundary_inf;
  int sup_node, inf_node, sup_sample, inf_sample;
};

Extrema scan(const Expr& u, const GridDomain& dom) {
  Extrema e;
  e.interior_sup = -std::numeric_limits<double>::infinity();
  e.interior_inf = std::numeric_limits<double>::infinity();
  e.boundary_sup = e.interior_sup;
  e.boundary_inf = e.interior_inf;
  e.sup_node = e.inf_node = e.sup_sample = e.inf_sample = -1;
  for (int id : dom.interior) {
    const Vec2 p = dom.at(id);
    const double v = u.eval(p.x, p.y);
    if (!std::isfinite(v)) throw EvalError("solution evaluates non-finitely", p.x, p.y);
    if (v > e.interior_sup) {
      e.interior_sup = v;
      e.sup_node = id;
    }
    if (v < e.interior_inf) {
      e.interior_inf = v;
      e.inf_node = id;
    }
  }
  for (std::size_t k = 0; k < dom.boundary_samples.size(); ++k) {
    const Vec2 p = dom.boundary_samples[k];
    const double v = u.eval(p.x, p.y);
    if (!std::isfinite(v)) throw EvalError("solution evaluates non-finitely", p.x, p.y);
    if (v > e.boundary_sup) {
      e.boundary_sup = v;
      e.sup_sample = static_cast<int>(k);
    }
    if (v < e.boundary_inf) {
      e.boundary_inf = v;
      e.inf_sample = static_cast<int>(k);
    }
  }
  return e;
}

}  // namespace

MaxPrincipleReport check_max_principle(const TransportInstance& inst, double tol) {
  if (tol <= 0.0) throw Error("tolerance must be positive");
  const Extrema e = scan(inst.u, inst.dom);
  MaxPrincipleReport r;
  r.interior_sup = e.interior_sup;
  r.boundary_sup = e.boundary_sup;
  r.interior_inf = e.interior_inf;
  r.boundary_inf = e.boundary_inf;
  r.sup_node = e.sup_node;
  r.inf_node = e.inf_node;
  r.sup_sample = e.sup_sample;
  r.inf_sample = e.inf_sample;
  r.sup_gap = e.interior_sup - e.boundary_sup;
  r.inf_gap = e.boundary_inf - e.interior_inf;
  r.tolerance = tol;
  r.passes = std::fabs(r.sup_gap) <= tol && std::fabs(r.inf_gap) <= tol;
  return r;
}

CounterexampleReport counterexample_probe(const Expr& beta, const Expr& profile,
                                          const GridDomain& dom, double tol) {
  if (tol <= 0.0) throw Error("tolerance must be positive");
  const Expr u = profile.substitute(beta, beta);
  const Expr bx = beta.dx(), by = beta.dy();

  CounterexampleReport r;
  r.tolerance = tol;
  r.min_grad_norm_beta = std::numeric_limits<double>::infinity();
  for (int id : dom.interior) {
    const Vec2 p = dom.at(id);
    const double gn = std::hypot(bx.eval(p.x, p.y), by.eval(p.x, p.y));
    if (gn < r.min_grad_norm_beta) {
      r.min_grad_norm_beta = gn;
      r.critical_node = id;
    }
  }

  const Extrema e = scan(u, dom);
  r.interior_sup = e.interior_sup;
  r.boundary_sup = e.boundary_sup;
  r.interior_inf = e.interior_inf;
  r.boundary_inf = e.boundary_inf;
  r.sup_excess = e.interior_sup - e.boundary_sup;
  r.inf_excess = e.boundary_inf - e.interior_inf;
  r.max_principle_failed = r.sup_excess > tol || r.inf_excess > tol;
  return r;
}

double default_tolerance(const TransportInstance& inst) {
  const FieldExpr uf = FieldExpr::scalar(inst.u);
  return 2.0 * inst.dom.spacing() * std::max(1.0, grid::lipschitz_estimate(uf, inst.dom));
}

nlohmann::ordered_json to_json(const MaxPrincipleReport& r) {
  nlohmann::ordered_json j;
  j["passes"] = r.passes;
  j["interior_sup"] = r.interior_sup;
  j["boundary_sup"] = r.boundary_sup;
  j["interior_inf"] = r.interior_inf;
  j["boundary_inf"] = r.boundary_inf;
  j["sup_gap"] = r.sup_gap;
  j["inf_gap"] = r.inf_gap;
  j["sup_node"] = r.sup_node;
  j["inf_node"] = r.inf_node;
  j["tolerance"] = r.tolerance;
  return j;
}

nlohmann::ordered_json to_json(const CounterexampleReport& r) {
  nlohmann::ordered_json j;
  j["max_principle_failed"] = r.max_principle_failed;
  j["min_grad_norm_beta"] = r.min_grad_norm_beta;
  j["critical_node"] = r.critical_node;
  j["interior_sup"] = r.interior_sup;
  j["boundary_sup"] = r.boundary_sup;
  j["interior_inf"] = r.interior_inf;
  j["boundary_inf"] = r.boundary_inf;
  j["sup_excess"] = r.sup_excess;
  j["inf_excess"] = r.inf_excess;
  j["tolerance"] = r.tolerance;
  return j;
}

}  // namespace hull_lab::transport
