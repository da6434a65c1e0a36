#include "hull_lab/hull_property.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hull_lab/parallel.hpp"

namespace hull_lab::hull_property {

double QuasiConvexProbe::operator()(std::span<const double> y) const {
  switch (kind) {
    case Kind::linear: {
      double s = 0.0;
      for (std::size_t k = 0; k < direction.size(); ++k) s += direction[k] * y[k];
      return s;
    }
    case Kind::norm_distance: {
      double s = 0.0;
      for (std::size_t k = 0; k < center.size(); ++k) {
        const double d = y[k] - center[k];
        s += d * d;
      }
      return std::sqrt(s);
    }
    case Kind::max_of_linears: {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < directions.size(); ++i) {
        double s = offsets[i];
        for (std::size_t k = 0; k < directions[i].size(); ++k) s += directions[i][k] * y[k];
        best = std::max(best, s);
      }
      return best;
    }
  }
  return 0.0;
}

namespace {

std::vector<double> normalized(std::vector<double> v) {
  double n = 0.0;
  for (double c : v) n += c * c;
  n = std::sqrt(n);
  if (n == 0.0) throw Error("probe direction must be non-zero");
  for (double& c : v) c /= n;
  return v;
}

std::string tuple_str(std::span<const double> v) {
  std::ostringstream os;
  os.precision(6);
  os << "(";
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ", " : "") << v[k];
  os << ")";
  return os.str();
}

}  // namespace

QuasiConvexProbe QuasiConvexProbe::linear(std::vector<double> dir) {
  QuasiConvexProbe p;
  p.kind = Kind::linear;
  p.direction = normalized(std::move(dir));
  return p;
}

QuasiConvexProbe QuasiConvexProbe::norm_distance(std::vector<double> c) {
  QuasiConvexProbe p;
  p.kind = Kind::norm_distance;
  p.center = std::move(c);
  return p;
}

QuasiConvexProbe QuasiConvexProbe::max_of_linears(std::vector<std::vector<double>> dirs,
                                                  std::vector<double> offs) {
  if (dirs.empty() || dirs.size() != offs.size())
    throw Error("max_of_linears needs matching non-empty direction and offset lists");
  QuasiConvexProbe p;
  p.kind = Kind::max_of_linears;
  for (auto& d : dirs) p.directions.push_back(normalized(std::move(d)));
  p.offsets = std::move(offs);
  return p;
}

std::string QuasiConvexProbe::describe() const {
  switch (kind) {
    case Kind::linear:
      return "linear" + tuple_str(direction);
    case Kind::norm_distance:
      return "norm_distance" + tuple_str(center);
    case Kind::max_of_linears:
      return "max_of_" + std::to_string(directions.size()) + "_linears";
  }
  return "?";
}

std::vector<QuasiConvexProbe> default_probe_family(int n_directions, bool include_norm) {
  std::vector<QuasiConvexProbe> fam;
  fam.reserve(n_directions + 1);
  for (int k = 0; k < n_directions; ++k) {
    const double th = 2.0 * 3.14159265358979323846 * k / n_directions;
    fam.push_back(QuasiConvexProbe::linear({std::cos(th), std::sin(th)}));
  }
  if (include_norm) fam.push_back(QuasiConvexProbe::norm_distance({0.0, 0.0}));
  return fam;
}

namespace {

double sup_over(const QuasiConvexProbe& psi, std::span<const Vec2> values) {
  double s = -std::numeric_limits<double>::infinity();
  for (const Vec2& v : values) {
    const double a[2] = {v.x, v.y};
    s = std::max(s, psi(a));
  }
  return s;
}

}  // namespace

HullPropertyReport check_hull_property_points(std::span<const Vec2> interior_values,
                                              std::span<const int> interior_nodes,
                                              std::span<const Vec2> boundary_values, double tol,
                                              const GridDomain& dom,
                                              const std::vector<QuasiConvexProbe>& probes) {
  if (tol <= 0.0) throw Error("tolerance must be positive");
  if (boundary_values.empty()) throw EmptyBoundaryError("no boundary image points");
  if (interior_values.size() != interior_nodes.size())
    throw Error("interior values and node list disagree");

  // conv(B) = conv(hull vertices of B); the reduced generator set makes the
  // per-node projection cheaper without changing any distance.
  const geometry::HullRegion bhull = geometry::convex_hull_2d(
      geometry::PointSet::plane(std::vector<Vec2>(boundary_values.begin(), boundary_values.end())));
  const geometry::PointSet generators = geometry::PointSet::plane(bhull.hull_vertices);

  const double fw_tol = std::min(tol / 4.0, 1e-8);
  std::vector<double> violation(interior_values.size(), 0.0);
  parallel_for(interior_values.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const double qv[2] = {interior_values[k].x, interior_values[k].y};
      violation[k] = geometry::hull_distance(qv, generators, fw_tol);
    }
  });

  HullPropertyReport rep;
  rep.tolerance = tol;
  rep.worst_violation = -1.0;
  for (std::size_t k = 0; k < violation.size(); ++k) {
    if (violation[k] > rep.worst_violation) {
      rep.worst_violation = violation[k];
      rep.worst_node = interior_nodes[k];
    }
  }
  if (rep.worst_violation < 0.0) rep.worst_violation = 0.0;
  if (rep.worst_node >= 0) rep.worst_point = dom.at(rep.worst_node);
  rep.holds = rep.worst_violation <= tol;

  for (const auto& psi : probes) {
    ProbeGap g;
    g.probe = psi.describe();
    g.interior_sup = sup_over(psi, interior_values);
    g.boundary_sup = sup_over(psi, boundary_values);
    rep.probe_gaps.push_back(std::move(g));
  }
  return rep;
}

HullPropertyReport check_hull_property(const FieldExpr& f, const GridDomain& dom, double tol,
                                       const std::vector<QuasiConvexProbe>& probes) {
  std::vector<Vec2> interior_pts;
  interior_pts.reserve(dom.interior.size());
  for (int id : dom.interior) interior_pts.push_back(dom.at(id));
  const std::vector<Vec2> fi = grid::eval_vec2(f, interior_pts);
  const std::vector<Vec2> fb = grid::eval_vec2(f, dom.boundary_samples);
  return check_hull_property_points(fi, dom.interior, fb, tol, dom, probes);
}

HullPropertyReport check_hull_property(const FieldExpr& f, const GridDomain& dom, double tol) {
  return check_hull_property(f, dom, tol, default_probe_family());
}

std::pair<double, double> probe_sup_gap(const FieldExpr& f, const GridDomain& dom,
                                        const QuasiConvexProbe& psi) {
  std::vector<Vec2> interior_pts;
  interior_pts.reserve(dom.interior.size());
  for (int id : dom.interior) interior_pts.push_back(dom.at(id));
  const std::vector<Vec2> fi = grid::eval_vec2(f, interior_pts);
  const std::vector<Vec2> fb = grid::eval_vec2(f, dom.boundary_samples);
  return {sup_over(psi, fi), sup_over(psi, fb)};
}

HullLikeReport check_hull_like_property(const FieldExpr& f, const GridDomain& dom,
                                        const std::vector<QuasiConvexProbe>& probes,
                                        const std::vector<double>& collar_widths, double tol) {
  if (tol <= 0.0) throw Error("tolerance must be positive");
  if (probes.empty()) throw Error("probe family must be non-empty");
  if (collar_widths.empty()) throw Error("collar width list must be non-empty");
  for (std::size_t j = 1; j < collar_widths.size(); ++j)
    if (!(collar_widths[j] < collar_widths[j - 1]))
      throw Error("collar widths must be strictly decreasing");
  if (collar_widths.back() < 2.0 * dom.spacing())
    throw Error("thinnest collar must be at least two grid spacings wide");

  std::vector<grid::Collar> collars;
  for (double w : collar_widths) collars.push_back(grid::make_collar(dom, w));
  if (collars.back().nodes.empty())
    throw CollarTooThinError("thinnest collar contains no interior nodes");

  std::vector<Vec2> interior_pts;
  interior_pts.reserve(dom.interior.size());
  for (int id : dom.interior) interior_pts.push_back(dom.at(id));
  const std::vector<Vec2> fi = grid::eval_vec2(f, interior_pts);

  std::vector<int> pos(dom.nx * dom.ny, -1);
  for (std::size_t k = 0; k < dom.interior.size(); ++k) pos[dom.interior[k]] = static_cast<int>(k);

  HullLikeReport rep;
  rep.tolerance = tol;
  rep.satisfied = true;
  for (const auto& psi : probes) {
    HullLikeProbeResult r;
    r.probe = psi.describe();
    std::vector<double> vals(fi.size());
    for (std::size_t k = 0; k < fi.size(); ++k) {
      const double a[2] = {fi[k].x, fi[k].y};
      vals[k] = psi(a);
    }
    r.interior_sup = *std::max_element(vals.begin(), vals.end());
    for (const auto& c : collars) {
      CollarTrace t;
      t.width = c.width;
      t.nodes = c.nodes.size();
      t.sup = -std::numeric_limits<double>::infinity();
      for (int id : c.nodes) t.sup = std::max(t.sup, vals[pos[id]]);
      r.collar.push_back(t);
    }
    r.satisfied = r.collar.back().sup >= r.interior_sup - tol;
    rep.satisfied = rep.satisfied && r.satisfied;
    rep.probes.push_back(std::move(r));
  }
  return rep;
}

std::vector<double> default_collar_widths(const GridDomain& dom, double delta1, int levels) {
  if (delta1 <= 0.0) delta1 = 10.0 * dom.spacing();
  std::vector<double> w;
  for (int j = 0; j < levels; ++j) w.push_back(delta1 / std::pow(2.0, j));
  while (w.size() > 1 && w.back() < 2.0 * dom.spacing()) w.pop_back();
  return w;
}

double default_tolerance(const FieldExpr& f, const GridDomain& dom) {
  return 4.0 * dom.spacing() * std::max(1.0, grid::lipschitz_estimate(f, dom));
}

nlohmann::ordered_json to_json(const HullPropertyReport& r) {
  nlohmann::ordered_json j;
  j["holds"] = r.holds;
  j["worst_point"] = {r.worst_point.x, r.worst_point.y};
  j["worst_node"] = r.worst_node;
  j["violation"] = r.worst_violation;
  j["tolerance"] = r.tolerance;
  auto& gaps = j["probe_gaps"] = nlohmann::ordered_json::array();
  for (const auto& g : r.probe_gaps)
    gaps.push_back({{"probe", g.probe},
                    {"interior_sup", g.interior_sup},
                    {"boundary_sup", g.boundary_sup},
                    {"gap", g.interior_sup - g.boundary_sup}});
  return j;
}

nlohmann::ordered_json to_json(const HullLikeReport& r) {
  nlohmann::ordered_json j;
  j["satisfied"] = r.satisfied;
  j["tolerance"] = r.tolerance;
  auto& ps = j["probes"] = nlohmann::ordered_json::array();
  for (const auto& p : r.probes) {
    nlohmann::ordered_json pj;
    pj["probe"] = p.probe;
    pj["interior_sup"] = p.interior_sup;
    pj["satisfied"] = p.satisfied;
    auto& tr = pj["collar_trace"] = nlohmann::ordered_json::array();
    for (const auto& t : p.collar)
      tr.push_back({{"width", t.width}, {"sup", t.sup}, {"nodes", t.nodes}});
    ps.push_back(std::move(pj));
  }
  return j;
}

}  // namespace hull_lab::hull_property
