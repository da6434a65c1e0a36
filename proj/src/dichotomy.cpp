#include "hull_lab/dichotomy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hull_lab/svg.hpp"

namespace hull_lab::dichotomy {

namespace {

double probe_at(const QuasiConvexProbe& psi, Vec2 v) {
  const double a[2] = {v.x, v.y};
  return psi(a);
}

double phi_at(std::span<const double> phi, Vec2 v) { return phi[0] * v.x + phi[1] * v.y; }

std::vector<Vec2> interior_points(const GridDomain& dom) {
  std::vector<Vec2> pts;
  pts.reserve(dom.interior.size());
  for (int id : dom.interior) pts.push_back(dom.at(id));
  return pts;
}

}  // namespace

DichotomyCertificate build_certificate(const FieldExpr& f, const GridDomain& dom,
                                       const QuasiConvexProbe& psi, double collar_width,
                                       const CertificateOptions& opts) {
  if (f.output_dim() != 2) throw ArityError("certificates are built for planar fields");
  const grid::Collar collar = grid::make_collar(dom, collar_width);
  if (collar.nodes.empty()) throw CollarTooThinError("certificate collar contains no nodes");

  const std::vector<Vec2> pts = interior_points(dom);
  const std::vector<Vec2> fi = grid::eval_vec2(f, pts);
  std::vector<double> psi_vals(fi.size());
  for (std::size_t k = 0; k < fi.size(); ++k) psi_vals[k] = probe_at(psi, fi[k]);

  std::vector<int> pos(dom.nx * dom.ny, -1);
  for (std::size_t k = 0; k < dom.interior.size(); ++k) pos[dom.interior[k]] = static_cast<int>(k);

  double sup_collar = -std::numeric_limits<double>::infinity();
  for (int id : collar.nodes) sup_collar = std::max(sup_collar, psi_vals[pos[id]]);

  double sup_interior = -std::numeric_limits<double>::infinity();
  int witness = -1;
  for (std::size_t k = 0; k < psi_vals.size(); ++k) {
    if (psi_vals[k] > sup_interior) {
      sup_interior = psi_vals[k];
      witness = dom.interior[k];
    }
  }

  const double lip = grid::lipschitz_estimate(f, dom);
  const double margin = sup_interior - sup_collar;
  if (!(margin > 8.0 * lip * dom.spacing()))
    throw NoCertificateError(
        "collar sup is not separated from the interior sup; the field may satisfy the "
        "hull-like property for this probe");

  DichotomyCertificate cert;
  cert.probe = psi;
  cert.collar_width = collar_width;
  cert.collar_sup = sup_collar;
  cert.interior_sup = sup_interior;
  cert.level_r = 0.5 * (sup_collar + sup_interior);
  cert.witness_node = witness;

  for (std::size_t k = 0; k < psi_vals.size(); ++k)
    if (psi_vals[k] >= cert.level_r) cert.core.push_back(dom.interior[k]);

  for (int id : collar.nodes)
    if (psi_vals[pos[id]] >= cert.level_r)
      throw CertificateInvalidError("core reaches into the boundary collar");

  // Cloud approximating the convex sublevel set {psi <= r}: image values on
  // the complement of K, plus random samples of the analytic sublevel set
  // inside the inflated bounding box of f.
  std::vector<std::vector<double>> cloud;
  for (std::size_t k = 0; k < fi.size(); ++k)
    if (psi_vals[k] <= cert.level_r) cloud.push_back({fi[k].x, fi[k].y});

  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
  double lo_y = lo_x, hi_y = -lo_x;
  auto absorb = [&](Vec2 v) {
    lo_x = std::min(lo_x, v.x);
    hi_x = std::max(hi_x, v.x);
    lo_y = std::min(lo_y, v.y);
    hi_y = std::max(hi_y, v.y);
  };
  for (const Vec2& v : fi) absorb(v);
  for (const Vec2& v : grid::eval_vec2(f, dom.boundary_samples)) absorb(v);
  const double pad_x = opts.box_inflation * std::max(hi_x - lo_x, 1e-12);
  const double pad_y = opts.box_inflation * std::max(hi_y - lo_y, 1e-12);
  lo_x -= pad_x;
  hi_x += pad_x;
  lo_y -= pad_y;
  hi_y += pad_y;

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> ux(lo_x, hi_x), uy(lo_y, hi_y);
  int kept = 0;
  for (long attempt = 0; attempt < 1000L * opts.sublevel_samples && kept < opts.sublevel_samples;
       ++attempt) {
    const Vec2 cand = {ux(rng), uy(rng)};
    if (probe_at(psi, cand) <= cert.level_r) {
      cloud.push_back({cand.x, cand.y});
      ++kept;
    }
  }
  if (cloud.empty()) throw SublevelSamplingError("sublevel cloud is empty");

  const Vec2 f_witness = fi[pos[witness]];
  geometry::SeparationWitness sep;
  try {
    sep = geometry::separate(std::array<double, 2>{f_witness.x, f_witness.y},
                             geometry::PointSet(2, std::move(cloud)), opts.separation_tol);
  } catch (const NoSeparationError&) {
    throw SublevelSamplingError(
        "could not separate the witness image from the sampled sublevel set; "
        "the sampling density may be insufficient");
  }
  cert.phi = sep.direction;

  const double lo = phi_at(cert.phi, f_witness);
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < fi.size(); ++k)
    if (psi_vals[k] < cert.level_r) hi = std::min(hi, phi_at(cert.phi, fi[k]));
  if (!(lo < hi))
    throw SublevelSamplingError("separating functional does not isolate the witness value");
  cert.level_rho = 0.5 * (lo + hi);

  for (std::size_t k = 0; k < fi.size(); ++k)
    if (phi_at(cert.phi, fi[k]) < cert.level_rho) cert.region.push_back(dom.interior[k]);

  // Invariants checked before returning.
  if (cert.region.empty()) throw CertificateInvalidError("region X is empty");
  if (!std::binary_search(cert.region.begin(), cert.region.end(), witness))
    throw CertificateInvalidError("witness node fell outside X");
  for (int id : cert.region)
    if (!std::binary_search(cert.core.begin(), cert.core.end(), id))
      throw CertificateInvalidError("X is not contained in K");
  if (!(cert.collar_sup < cert.level_r && cert.level_r < cert.interior_sup))
    throw CertificateInvalidError("level r is not strictly between the sups");
  return cert;
}

double lambda_tilde(const FieldExpr& g, const FieldExpr& f, const GridDomain& dom,
                    const DichotomyCertificate& cert) {
  if (cert.region.empty()) throw CertificateInvalidError("certificate has an empty region X");

  double inf_core = std::numeric_limits<double>::infinity();
  for (int id : cert.core) {
    const Vec2 p = dom.at(id);
    const Vec2 gv = {g.component(0).eval(p.x, p.y), g.component(1).eval(p.x, p.y)};
    inf_core = std::min(inf_core, phi_at(cert.phi, gv));
  }

  double lam = std::numeric_limits<double>::infinity();
  for (int id : cert.region) {
    const Vec2 p = dom.at(id);
    const Vec2 gv = {g.component(0).eval(p.x, p.y), g.component(1).eval(p.x, p.y)};
    const Vec2 fv = {f.component(0).eval(p.x, p.y), f.component(1).eval(p.x, p.y)};
    const double denom = cert.level_rho - phi_at(cert.phi, fv);
    if (!(denom > 0.0))
      throw CertificateInvalidError("non-positive denominator in the threshold formula");
    lam = std::min(lam, (phi_at(cert.phi, gv) - inf_core) / denom);
  }
  return std::max(0.0, lam);
}

SupportVerdict verify_supported(const FieldExpr& g, const FieldExpr& f, const GridDomain& dom,
                                const DichotomyCertificate& cert, double lambda, double tol) {
  const double threshold = lambda_tilde(g, f, dom, cert);
  if (!(lambda > threshold))
    throw std::invalid_argument("lambda must exceed the certificate threshold");

  auto image_at = [&](int id) {
    const Vec2 p = dom.at(id);
    return Vec2{g.component(0).eval(p.x, p.y) + lambda * f.component(0).eval(p.x, p.y),
                g.component(1).eval(p.x, p.y) + lambda * f.component(1).eval(p.x, p.y)};
  };

  int xhat = -1;
  double best = std::numeric_limits<double>::infinity();
  for (int id : cert.core) {
    const double v = phi_at(cert.phi, image_at(id));
    if (v < best) {
      best = v;
      xhat = id;
    }
  }
  if (!std::binary_search(cert.region.begin(), cert.region.end(), xhat))
    throw TheoremViolationError(
        "the phi-minimizer over K fell outside X; certificate margins are too thin for this "
        "grid");

  std::vector<Vec2> image;
  image.reserve(cert.region.size());
  for (int id : cert.region) image.push_back(image_at(id));
  const geometry::HullRegion hull = geometry::convex_hull_2d(geometry::PointSet::plane(image));

  const Vec2 yhat = image_at(xhat);
  SupportVerdict v;
  v.lambda = lambda;
  v.support_node = xhat;
  v.functional.direction = cert.phi;
  v.functional.threshold = phi_at(cert.phi, yhat);
  v.functional.margin = 0.0;
  v.boundary_distance = geometry::polygon_boundary_distance(yhat, hull.hull_vertices);
  v.tolerance = tol;
  v.within_tolerance = v.boundary_distance <= tol;
  return v;
}

nlohmann::ordered_json to_json(const DichotomyCertificate& cert) {
  nlohmann::ordered_json j;
  j["probe"] = cert.probe.describe();
  nlohmann::ordered_json pj;
  pj["kind"] = static_cast<int>(cert.probe.kind);
  pj["direction"] = cert.probe.direction;
  pj["center"] = cert.probe.center;
  pj["directions"] = cert.probe.directions;
  pj["offsets"] = cert.probe.offsets;
  j["probe_data"] = pj;
  j["collar_width"] = cert.collar_width;
  j["collar_sup"] = cert.collar_sup;
  j["interior_sup"] = cert.interior_sup;
  j["r"] = cert.level_r;
  j["phi"] = cert.phi;
  j["rho"] = cert.level_rho;
  j["witness_node"] = cert.witness_node;
  j["core"] = cert.core;
  j["region"] = cert.region;
  return j;
}

DichotomyCertificate certificate_from_json(const nlohmann::ordered_json& j) {
  DichotomyCertificate c;
  const auto& pj = j.at("probe_data");
  c.probe.kind = static_cast<QuasiConvexProbe::Kind>(pj.at("kind").get<int>());
  c.probe.direction = pj.at("direction").get<std::vector<double>>();
  c.probe.center = pj.at("center").get<std::vector<double>>();
  c.probe.directions = pj.at("directions").get<std::vector<std::vector<double>>>();
  c.probe.offsets = pj.at("offsets").get<std::vector<double>>();
  c.collar_width = j.at("collar_width").get<double>();
  c.collar_sup = j.at("collar_sup").get<double>();
  c.interior_sup = j.at("interior_sup").get<double>();
  c.level_r = j.at("r").get<double>();
  c.phi = j.at("phi").get<std::vector<double>>();
  c.level_rho = j.at("rho").get<double>();
  c.witness_node = j.at("witness_node").get<int>();
  c.core = j.at("core").get<std::vector<int>>();
  c.region = j.at("region").get<std::vector<int>>();
  return c;
}

void write_support_svg(const std::string& path, const GridDomain& dom,
                       const DichotomyCertificate& cert, const SupportVerdict& verdict) {
  svg::Canvas canvas(dom.x_min, dom.x_max, dom.y_min, dom.y_max, 720);
  for (int id : dom.interior) canvas.rect(dom.at(id), dom.dx, dom.dy, "#dfe8f5");
  for (int id : cert.core) canvas.rect(dom.at(id), dom.dx, dom.dy, "#9fc1e8");
  for (int id : cert.region) canvas.rect(dom.at(id), dom.dx, dom.dy, "#4178be");
  std::vector<Vec2> boundary = dom.boundary_samples;
  for (const Vec2& b : boundary) canvas.circle(b, 0.2 * dom.spacing(), "#444444");
  canvas.circle(dom.at(cert.witness_node), 1.2 * dom.spacing(), "#d04040");
  canvas.circle(dom.at(verdict.support_node), 1.2 * dom.spacing(), "#f0a000");
  canvas.text({dom.x_min + 0.02 * (dom.x_max - dom.x_min), dom.y_max - 0.05 * (dom.y_max - dom.y_min)},
              "domain / core / region with witness (red) and support point (orange)");
  canvas.write(path);
}

}  // namespace hull_lab::dichotomy
