#include "hull_lab/singularity.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>

#include "hull_lab/parallel.hpp"
#include "hull_lab/svg.hpp"

namespace hull_lab::singularity {

QuadraticDetCoeffs det_quadratic(const FieldExpr& f, const FieldExpr& g, Vec2 p) {
  if (f.output_dim() != 2 || g.output_dim() != 2)
    throw ArityError("det_quadratic requires two planar fields");
  const grid::JacobianSample jf = grid::jacobian(f, p);
  const grid::JacobianSample jg = grid::jacobian(g, p);
  const double ux = jf.m[0][0], uy = jf.m[0][1], vx = jf.m[1][0], vy = jf.m[1][1];
  const double ax = jg.m[0][0], ay = jg.m[0][1], bx = jg.m[1][0], by = jg.m[1][1];
  QuadraticDetCoeffs q;
  q.a = ux * vy - uy * vx;
  q.b = by * ux - bx * uy - ay * vx + ax * vy;
  q.c = ax * by - ay * bx;
  return q;
}

namespace {

std::vector<double> lambda_grid(double lo, double hi, int steps) {
  if (steps < 1) throw Error("lambda sweep needs at least one step");
  if (!(hi >= lo)) throw Error("lambda_max must be at least lambda_min");
  std::vector<double> grid(steps);
  if (steps == 1) {
    grid[0] = lo;
    return grid;
  }
  if (lo > 0.0) {
    const double ratio = std::pow(hi / lo, 1.0 / (steps - 1));
    double v = lo;
    for (int i = 0; i < steps; ++i, v *= ratio) grid[i] = v;
    grid.back() = hi;
  } else {
    for (int i = 0; i < steps; ++i) grid[i] = lo + (hi - lo) * i / (steps - 1);
  }
  return grid;
}

struct NodePartials {
  double ux, uy, vx, vy;  // f
  double ax, ay, bx, by;  // g
};

}  // namespace

SingularSweepResult singular_sweep(const FieldExpr& g, const FieldExpr& f, const GridDomain& dom,
                                   const std::vector<int>& region, double lambda_min,
                                   double lambda_max, int steps, double tol_det) {
  if (region.empty()) throw Error("sweep region is empty");
  if (tol_det <= 0.0) throw Error("tol_det must be positive");

  // Per-node analytic partials are lambda-independent; cache them once.
  std::vector<NodePartials> parts(region.size());
  for (std::size_t k = 0; k < region.size(); ++k) {
    const Vec2 p = dom.at(region[k]);
    const grid::JacobianSample jf = grid::jacobian(f, p);
    const grid::JacobianSample jg = grid::jacobian(g, p);
    parts[k] = {jf.m[0][0], jf.m[0][1], jf.m[1][0], jf.m[1][1],
                jg.m[0][0], jg.m[0][1], jg.m[1][0], jg.m[1][1]};
  }
  std::vector<int> pos(dom.nx * dom.ny, -1);
  for (std::size_t k = 0; k < region.size(); ++k) pos[region[k]] = static_cast<int>(k);

  SingularSweepResult res;
  res.tol_det = tol_det;
  const std::vector<double> lambdas = lambda_grid(lambda_min, lambda_max, steps);
  res.samples.resize(lambdas.size());

  parallel_for(lambdas.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> det(region.size());
    for (std::size_t li = begin; li < end; ++li) {
      const double lam = lambdas[li];
      LambdaSample s;
      s.lambda = lam;
      s.min_abs_det = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < region.size(); ++k) {
        const NodePartials& n = parts[k];
        const double d = (n.ax + lam * n.ux) * (n.by + lam * n.vy) -
                         (n.ay + lam * n.uy) * (n.bx + lam * n.vx);
        det[k] = d;
        if (std::fabs(d) < s.min_abs_det) {
          s.min_abs_det = std::fabs(d);
          s.argmin_node = region[k];
        }
      }
      for (std::size_t k = 0; k < region.size() && !s.sign_change; ++k) {
        const int id = region[k];
        const int i = dom.ix(id), j = dom.iy(id);
        if (i + 1 < dom.nx) {
          const int p2 = pos[dom.index(i + 1, j)];
          if (p2 >= 0 && det[k] * det[p2] < 0.0) s.sign_change = true;
        }
        if (!s.sign_change && j + 1 < dom.ny) {
          const int p2 = pos[dom.index(i, j + 1)];
          if (p2 >= 0 && det[k] * det[p2] < 0.0) s.sign_change = true;
        }
      }
      s.certified = (s.min_abs_det <= tol_det) || s.sign_change;
      res.samples[li] = s;
    }
  });

  for (const auto& s : res.samples)
    if (s.certified) {
      res.first_certified = s.lambda;
      break;
    }
  return res;
}

namespace {

// Damped Gauss-Newton refinement of map(x) = target.
struct Refined {
  Vec2 x;
  double residual;
  bool converged;
};

Refined gauss_newton(const FieldExpr& map, Vec2 target, Vec2 x0, double stop_residual,
                     int max_steps = 20) {
  Vec2 x = x0;
  auto residual_at = [&](Vec2 p) {
    return Vec2{map.component(0).eval(p.x, p.y) - target.x,
                map.component(1).eval(p.x, p.y) - target.y};
  };
  Vec2 r = residual_at(x);
  double rn = norm(r);
  for (int it = 0; it < max_steps && rn > stop_residual; ++it) {
    const grid::JacobianSample J = grid::jacobian(map, x);
    // Normal equations with a tiny Tikhonov floor; behaves like the
    // pseudo-inverse when J is rank-deficient (level-curve targets).
    const double a = J.m[0][0], b = J.m[0][1], c = J.m[1][0], d = J.m[1][1];
    const double ata = a * a + c * c, atb = a * b + c * d, btb = b * b + d * d;
    const double mu = 1e-12 * (ata + btb) + 1e-300;
    const double m00 = ata + mu, m01 = atb, m11 = btb + mu;
    const double rhs0 = -(a * r.x + c * r.y), rhs1 = -(b * r.x + d * r.y);
    const double det = m00 * m11 - m01 * m01;
    if (det == 0.0) break;
    Vec2 step = {(rhs0 * m11 - rhs1 * m01) / det, (rhs1 * m00 - rhs0 * m01) / det};
    double scale = 1.0;
    for (int half = 0; half < 12; ++half) {
      const Vec2 cand = x + scale * step;
      const Vec2 rc = residual_at(cand);
      if (norm(rc) < rn) {
        x = cand;
        r = rc;
        rn = norm(rc);
        break;
      }
      scale *= 0.5;
    }
    if (scale < 1e-3 && rn > stop_residual) break;
  }
  return {x, rn, rn < stop_residual};
}

}  // namespace

PreimageResult preimage_count(const FieldExpr& map, Vec2 target, const GridDomain& dom,
                              const std::vector<int>& region, double tol_x, double tol_y) {
  if (tol_x <= 0.0 || tol_y <= 0.0) throw Error("preimage tolerances must be positive");
  PreimageResult res;

  std::vector<int> pos(dom.nx * dom.ny, -1);
  std::vector<double> resid(region.size());
  std::vector<bool> hit(region.size(), false);
  for (std::size_t k = 0; k < region.size(); ++k) {
    const Vec2 p = dom.at(region[k]);
    const Vec2 v = {map.component(0).eval(p.x, p.y) - target.x,
                    map.component(1).eval(p.x, p.y) - target.y};
    resid[k] = norm(v);
    hit[k] = resid[k] <= tol_y;
    pos[region[k]] = static_cast<int>(k);
  }

  std::vector<bool> seen(region.size(), false);
  for (std::size_t k = 0; k < region.size(); ++k) {
    if (!hit[k] || seen[k]) continue;
    PreimageCluster cl;
    std::deque<int> queue{static_cast<int>(k)};
    seen[k] = true;
    while (!queue.empty()) {
      const int cur = queue.front();
      queue.pop_front();
      cl.nodes.push_back(region[cur]);
      const int id = region[cur];
      const int i = dom.ix(id), j = dom.iy(id);
      const int nbs[4] = {id - 1, id + 1, id - dom.nx, id + dom.nx};
      const bool ok[4] = {i > 0, i + 1 < dom.nx, j > 0, j + 1 < dom.ny};
      for (int t = 0; t < 4; ++t) {
        if (!ok[t]) continue;
        const int p2 = pos[nbs[t]];
        if (p2 >= 0 && hit[p2] && !seen[p2]) {
          seen[p2] = true;
          queue.push_back(p2);
        }
      }
    }
    Vec2 lo = dom.at(cl.nodes[0]), hi = lo;
    double best = std::numeric_limits<double>::infinity();
    for (int id : cl.nodes) {
      const Vec2 p = dom.at(id);
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
      if (resid[pos[id]] < best) {
        best = resid[pos[id]];
        cl.best_node = id;
      }
    }
    cl.diameter = dist(lo, hi);
    res.non_isolated = res.non_isolated || cl.diameter > tol_x;

    const Refined r = gauss_newton(map, target, dom.at(cl.best_node), tol_y / 100.0);
    cl.refined = r.x;
    cl.refined_residual = r.residual;
    cl.converged = r.converged;
    if (cl.converged) {
      ++res.count;
      res.solutions.push_back(cl.refined);
    }
    res.clusters.push_back(std::move(cl));
  }

  if (res.count == 0 && !res.clusters.empty())
    throw CountUncertainError("no cluster refinement converged; counts are uncertain",
                              res.clusters);
  return res;
}

namespace {

FieldExpr combined_field(const FieldExpr& g, const FieldExpr& f, double lambda) {
  const grid::Expr lam = grid::Expr::constant(lambda);
  return FieldExpr::vector(g.component(0) + lam * f.component(0),
                           g.component(1) + lam * f.component(1));
}

}  // namespace

BifurcationWitness bifurcation_scan(const FieldExpr& g, const FieldExpr& f, const GridDomain& dom,
                                    const dichotomy::DichotomyCertificate& cert, double lambda,
                                    double r0, int kmax, double support_tol, double refine_tol) {
  const dichotomy::SupportVerdict verdict =
      dichotomy::verify_supported(g, f, dom, cert, lambda, support_tol);
  if (!verdict.within_tolerance)
    throw TheoremViolationError("support verdict failed; bifurcation scan has no anchor");

  const FieldExpr map = combined_field(g, f, lambda);
  const Vec2 xhat = dom.at(verdict.support_node);
  const Vec2 yhat = {map.component(0).eval(xhat.x, xhat.y), map.component(1).eval(xhat.x, xhat.y)};
  const Vec2 phi = {cert.phi[0], cert.phi[1]};

  BifurcationWitness wit;
  wit.lambda = lambda;
  wit.support_node = verdict.support_node;
  wit.phi = cert.phi;

  const double h = dom.spacing();
  for (int k = 1; k <= kmax; ++k) {
    BifurcationLevel lev;
    lev.k = k;
    lev.radius = r0 / std::pow(2.0, k);

    std::vector<int> ball;
    for (int id : cert.region)
      if (dist(dom.at(id), xhat) <= lev.radius) ball.push_back(id);
    if (ball.size() < 2) {
      lev.note = "ball too coarse: fewer than two region nodes inside";
      wit.levels.push_back(std::move(lev));
      continue;
    }

    double lk = 0.0;
    for (int id : ball) {
      const grid::JacobianSample J = grid::jacobian(map, dom.at(id));
      lk = std::max(lk, std::sqrt(J.m[0][0] * J.m[0][0] + J.m[0][1] * J.m[0][1] +
                                  J.m[1][0] * J.m[1][0] + J.m[1][1] * J.m[1][1]));
    }
    lev.eps = std::max(lev.radius * lk, 1e-12);

    // Targets stepped off the supported value against phi have no preimage.
    lev.outside_target = yhat - lev.eps * phi;
    try {
      const PreimageResult pr =
          preimage_count(map, lev.outside_target, dom, cert.region, 4.0 * h, lev.eps / 10.0);
      lev.no_preimage_ok = (pr.count == 0 && pr.clusters.empty());
    } catch (const CountUncertainError&) {
      lev.no_preimage_ok = false;
      lev.note += "outside target produced unresolvable clusters; ";
    }

    // Value collision inside the ball: two nodes far apart in the domain
    // mapping to nearly the same value.
    double best_val = std::numeric_limits<double>::infinity();
    int bu = -1, bv = -1;
    std::vector<Vec2> images(ball.size());
    for (std::size_t i = 0; i < ball.size(); ++i) {
      const Vec2 p = dom.at(ball[i]);
      images[i] = {map.component(0).eval(p.x, p.y), map.component(1).eval(p.x, p.y)};
    }
    for (std::size_t i = 0; i < ball.size(); ++i)
      for (std::size_t j = i + 1; j < ball.size(); ++j) {
        if (dist(dom.at(ball[i]), dom.at(ball[j])) < 2.0 * h) continue;
        const double dv = dist(images[i], images[j]);
        if (dv < best_val) {
          best_val = dv;
          bu = ball[i];
          bv = ball[j];
        }
      }
    if (bu < 0) {
      lev.note += "ball too coarse: no separated node pair";
      wit.levels.push_back(std::move(lev));
      continue;
    }
    const Vec2 pu = dom.at(bu), pv = dom.at(bv);
    const Vec2 iu = {map.component(0).eval(pu.x, pu.y), map.component(1).eval(pu.x, pu.y)};
    const Vec2 iv = {map.component(0).eval(pv.x, pv.y), map.component(1).eval(pv.x, pv.y)};
    const Vec2 z = 0.5 * (iu + iv);
    const Refined ru = gauss_newton(map, z, pu, refine_tol);
    const Refined rv = gauss_newton(map, z, pv, refine_tol);
    CollisionPair pair;
    pair.z = z;
    pair.u = ru.x;
    pair.v = rv.x;
    pair.residual_u = ru.residual;
    pair.residual_v = rv.residual;
    const double slack = 1.0 + 1e-9;
    lev.collision_ok = ru.converged && rv.converged && dist(ru.x, rv.x) >= h &&
                       dist(ru.x, xhat) <= slack * lev.radius + 2.0 * h &&
                       dist(rv.x, xhat) <= slack * lev.radius + 2.0 * h;
    lev.collision = pair;
    if (!lev.collision_ok) lev.note += "collision refinement failed;";
    wit.levels.push_back(std::move(lev));
  }
  return wit;
}

Remark1Report remark1_case(double lambda, int samples) {
  Remark1Report rep;
  rep.lambda = lambda;
  rep.samples = samples;

  const double pi = 3.14159265358979323846;
  std::vector<Vec2> pts(samples);
  for (int i = 0; i < samples; ++i) {
    const double t = pi * (i + 1) / (samples + 1);
    pts[i] = {lambda * std::cos(t), lambda * std::sin(t)};
  }
  double min_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i)
    for (int j = i + 1; j < samples; ++j) min_d = std::min(min_d, dist(pts[i], pts[j]));
  rep.min_pairwise_distance = min_d;
  rep.injective = min_d > 1e-12;

  const geometry::PointSet ends(2, {{lambda, 0.0}, {-lambda, 0.0}});
  const double mid[2] = {lambda * std::cos(pi / 2.0), lambda * std::sin(pi / 2.0)};
  rep.hull_violation = geometry::hull_distance(mid, ends, 1e-12);
  rep.domain_dim = 1;
  rep.codomain_dim = 2;
  rep.dims_match = false;
  return rep;
}

void write_sweep_csv(const std::string& path, const SingularSweepResult& res,
                     const GridDomain& dom) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open CSV output file: " + path);
  out << "lambda,min_abs_det,argmin_x,argmin_y,sign_change,certified\n";
  out.precision(17);
  for (const auto& s : res.samples) {
    const Vec2 p = s.argmin_node >= 0 ? dom.at(s.argmin_node) : Vec2{};
    out << s.lambda << "," << s.min_abs_det << "," << p.x << "," << p.y << ","
        << (s.sign_change ? 1 : 0) << "," << (s.certified ? 1 : 0) << "\n";
  }
}

void write_det_sign_svg(const std::string& path, const GridDomain& dom,
                        const std::vector<int>& region, const FieldExpr& g, const FieldExpr& f,
                        double lambda) {
  svg::Canvas canvas(dom.x_min, dom.x_max, dom.y_min, dom.y_max, 720);
  for (int id : region) {
    const QuadraticDetCoeffs q = det_quadratic(f, g, dom.at(id));
    const double d = q.eval(lambda);
    canvas.rect(dom.at(id), dom.dx, dom.dy, d >= 0.0 ? "#d7604c" : "#4575b4");
  }
  canvas.write(path);
}

nlohmann::ordered_json to_json(const BifurcationWitness& w) {
  nlohmann::ordered_json j;
  j["lambda"] = w.lambda;
  j["support_node"] = w.support_node;
  j["phi"] = w.phi;
  auto& levels = j["levels"] = nlohmann::ordered_json::array();
  for (const auto& lev : w.levels) {
    nlohmann::ordered_json lj;
    lj["k"] = lev.k;
    lj["radius"] = lev.radius;
    lj["eps"] = lev.eps;
    lj["outside_target"] = {lev.outside_target.x, lev.outside_target.y};
    lj["no_preimage_ok"] = lev.no_preimage_ok;
    lj["collision_ok"] = lev.collision_ok;
    if (lev.collision) {
      lj["z"] = {lev.collision->z.x, lev.collision->z.y};
      lj["u"] = {lev.collision->u.x, lev.collision->u.y};
      lj["v"] = {lev.collision->v.x, lev.collision->v.y};
      lj["residual_u"] = lev.collision->residual_u;
      lj["residual_v"] = lev.collision->residual_v;
    }
    if (!lev.note.empty()) lj["note"] = lev.note;
    levels.push_back(std::move(lj));
  }
  return j;
}

nlohmann::ordered_json to_json(const Remark1Report& r) {
  nlohmann::ordered_json j;
  j["lambda"] = r.lambda;
  j["samples"] = r.samples;
  j["injective"] = r.injective;
  j["min_pairwise_distance"] = r.min_pairwise_distance;
  j["hull_violation"] = r.hull_violation;
  j["domain_dim"] = r.domain_dim;
  j["codomain_dim"] = r.codomain_dim;
  j["dims_match"] = r.dims_match;
  return j;
}

}  // namespace hull_lab::singularity
