#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "hull_lab/geometry.hpp"
#include "hull_lab/grid.hpp"

namespace hull_lab::hull_property {

using grid::FieldExpr;
using grid::GridDomain;

// Continuous quasi-convex probe; every sublevel set is convex by
// construction for all three kinds.
struct QuasiConvexProbe {
  enum class Kind : unsigned char { linear, norm_distance, max_of_linears };
  Kind kind = Kind::linear;
  std::vector<double> direction;                 // linear
  std::vector<double> center;                    // norm_distance
  std::vector<std::vector<double>> directions;   // max_of_linears
  std::vector<double> offsets;

  double operator()(std::span<const double> y) const;
  std::string describe() const;

  static QuasiConvexProbe linear(std::vector<double> dir);
  static QuasiConvexProbe norm_distance(std::vector<double> c);
  static QuasiConvexProbe max_of_linears(std::vector<std::vector<double>> dirs,
                                         std::vector<double> offs);
};

// Default 2D family: evenly spaced unit directions plus the Euclidean norm.
// Linear probes decide closed convex hull separation, so the family is
// verdict-complete for planar images.
std::vector<QuasiConvexProbe> default_probe_family(int n_directions = 64, bool include_norm = true);

struct ProbeGap {
  std::string probe;
  double interior_sup = 0.0;
  double boundary_sup = 0.0;
};

struct HullPropertyReport {
  bool holds = false;
  int worst_node = -1;
  Vec2 worst_point;
  double worst_violation = 0.0;
  double tolerance = 0.0;
  std::vector<ProbeGap> probe_gaps;
};

struct CollarTrace {
  double width = 0.0;
  double sup = 0.0;
  std::size_t nodes = 0;
};

struct HullLikeProbeResult {
  std::string probe;
  double interior_sup = 0.0;
  std::vector<CollarTrace> collar;
  bool satisfied = false;
};

struct HullLikeReport {
  bool satisfied = false;
  double tolerance = 0.0;
  std::vector<HullLikeProbeResult> probes;
};

// Boundary-vs-interior containment test over raw image points; the FieldExpr
// overload below evaluates on the grid first. Exposed so gradient fields
// assembled from nodal samples can reuse the same decision procedure.
HullPropertyReport check_hull_property_points(std::span<const Vec2> interior_values,
                                              std::span<const int> interior_nodes,
                                              std::span<const Vec2> boundary_values, double tol,
                                              const GridDomain& dom,
                                              const std::vector<QuasiConvexProbe>& probes);

HullPropertyReport check_hull_property(const grid::FieldExpr& f, const GridDomain& dom, double tol,
                                       const std::vector<QuasiConvexProbe>& probes);
HullPropertyReport check_hull_property(const grid::FieldExpr& f, const GridDomain& dom, double tol);

std::pair<double, double> probe_sup_gap(const grid::FieldExpr& f, const GridDomain& dom,
                                        const QuasiConvexProbe& psi);

HullLikeReport check_hull_like_property(const grid::FieldExpr& f, const GridDomain& dom,
                                        const std::vector<QuasiConvexProbe>& probes,
                                        const std::vector<double>& collar_widths, double tol);

// Decreasing widths delta_1 = 10 dx halved J-1 times.
std::vector<double> default_collar_widths(const GridDomain& dom, double delta1 = 0.0, int levels = 5);
// 4 dx scaled by the field's Lipschitz estimate.
double default_tolerance(const grid::FieldExpr& f, const GridDomain& dom);

nlohmann::ordered_json to_json(const HullPropertyReport& r);
nlohmann::ordered_json to_json(const HullLikeReport& r);

}  // namespace hull_lab::hull_property
