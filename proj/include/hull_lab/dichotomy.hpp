#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "hull_lab/geometry.hpp"
#include "hull_lab/grid.hpp"
#include "hull_lab/hull_property.hpp"

namespace hull_lab::dichotomy {

using grid::FieldExpr;
using grid::GridDomain;
using hull_property::QuasiConvexProbe;

// Constructive objects extracted from a field that fails the hull-like
// property for the probe psi: level r splits the collar sup from the
// interior sup, K is the closed superlevel core, phi separates the witness
// image value from the sublevel cloud, and X is the open sub-core on which
// perturbed images stay supported.
struct DichotomyCertificate {
  QuasiConvexProbe probe;
  double collar_width = 0.0;
  double collar_sup = 0.0;
  double interior_sup = 0.0;
  double level_r = 0.0;
  std::vector<int> core;    // K, ascending node indices
  std::vector<double> phi;  // unit functional
  double level_rho = 0.0;
  std::vector<int> region;  // X subset of K, ascending node indices
  int witness_node = -1;    // argmax of psi(f), lowest index on ties
};

struct SupportVerdict {
  double lambda = 0.0;
  int support_node = -1;  // x-hat, argmin of <phi, g + lambda f> over K
  geometry::SeparationWitness functional;
  double boundary_distance = 0.0;  // of the supported image value to the image hull boundary
  double tolerance = 0.0;
  bool within_tolerance = false;
};

struct CertificateOptions {
  int sublevel_samples = 512;
  double box_inflation = 0.1;
  double separation_tol = 1e-9;
  std::uint64_t seed = 0x2545F4914F6CDD1DULL;
};

DichotomyCertificate build_certificate(const FieldExpr& f, const GridDomain& dom,
                                       const QuasiConvexProbe& psi, double collar_width,
                                       const CertificateOptions& opts = {});

double lambda_tilde(const FieldExpr& g, const FieldExpr& f, const GridDomain& dom,
                    const DichotomyCertificate& cert);

SupportVerdict verify_supported(const FieldExpr& g, const FieldExpr& f, const GridDomain& dom,
                                const DichotomyCertificate& cert, double lambda, double tol);

nlohmann::ordered_json to_json(const DichotomyCertificate& cert);
DichotomyCertificate certificate_from_json(const nlohmann::ordered_json& j);

void write_support_svg(const std::string& path, const GridDomain& dom,
                       const DichotomyCertificate& cert, const SupportVerdict& verdict);

}  // namespace hull_lab::dichotomy
