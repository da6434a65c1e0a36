#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hull_lab/dichotomy.hpp"
#include "hull_lab/grid.hpp"

namespace hull_lab::singularity {

using grid::FieldExpr;
using grid::GridDomain;

// det(J_{g + lambda f}) at a point equals a*lambda^2 + b*lambda + c with
// a = u_x v_y - u_y v_x, b = beta_y u_x - beta_x u_y - alpha_y v_x + alpha_x v_y,
// c = alpha_x beta_y - alpha_y beta_x, for f = (u, v), g = (alpha, beta).
struct QuadraticDetCoeffs {
  double a = 0.0, b = 0.0, c = 0.0;
  double eval(double lambda) const { return (a * lambda + b) * lambda + c; }
};

QuadraticDetCoeffs det_quadratic(const FieldExpr& f, const FieldExpr& g, Vec2 point);

struct LambdaSample {
  double lambda = 0.0;
  double min_abs_det = 0.0;
  int argmin_node = -1;
  bool sign_change = false;
  bool certified = false;  // min_abs_det <= tol_det or a 4-adjacent sign change
};

struct SingularSweepResult {
  std::vector<LambdaSample> samples;
  std::optional<double> first_certified;
  double tol_det = 0.0;
};

// Geometric lambda grid when lambda_min > 0, linear otherwise.
SingularSweepResult singular_sweep(const FieldExpr& g, const FieldExpr& f, const GridDomain& dom,
                                   const std::vector<int>& region, double lambda_min,
                                   double lambda_max, int steps, double tol_det);

struct PreimageCluster {
  std::vector<int> nodes;
  double diameter = 0.0;
  int best_node = -1;
  Vec2 refined;
  double refined_residual = 0.0;
  bool converged = false;
};

struct PreimageResult {
  int count = 0;           // clusters whose Gauss-Newton refinement converged
  bool non_isolated = false;  // some cluster is wider than tol_x (level-set-like)
  std::vector<Vec2> solutions;
  std::vector<PreimageCluster> clusters;
};

// Thrown when raw clusters exist but no refinement converges.
struct CountUncertainError : Error {
  std::vector<PreimageCluster> clusters;
  CountUncertainError(const std::string& msg, std::vector<PreimageCluster> cl)
      : Error(msg), clusters(std::move(cl)) {}
};

PreimageResult preimage_count(const FieldExpr& map, Vec2 target, const GridDomain& dom,
                              const std::vector<int>& region, double tol_x, double tol_y);

struct CollisionPair {
  Vec2 z;
  Vec2 u, v;
  double residual_u = 0.0, residual_v = 0.0;
};

struct BifurcationLevel {
  int k = 0;
  double radius = 0.0;
  double eps = 0.0;
  Vec2 outside_target;
  bool no_preimage_ok = false;
  std::optional<CollisionPair> collision;
  bool collision_ok = false;
  std::string note;
};

struct BifurcationWitness {
  double lambda = 0.0;
  int support_node = -1;
  std::vector<double> phi;
  std::vector<BifurcationLevel> levels;
};

BifurcationWitness bifurcation_scan(const FieldExpr& g, const FieldExpr& f, const GridDomain& dom,
                                    const dichotomy::DichotomyCertificate& cert, double lambda,
                                    double r0, int kmax, double support_tol,
                                    double refine_tol = 1e-8);

struct Remark1Report {
  double lambda = 0.0;
  int samples = 0;
  bool injective = false;
  double min_pairwise_distance = 0.0;
  double hull_violation = 0.0;
  int domain_dim = 1, codomain_dim = 2;
  bool dims_match = false;
};

// The circle arc lambda * (cos t, sin t) on (0, pi): injective for positive
// lambda yet its midpoint image sits at distance lambda from the hull of the
// two endpoint images.
Remark1Report remark1_case(double lambda, int samples = 1000);

void write_sweep_csv(const std::string& path, const SingularSweepResult& res, const GridDomain& dom);
void write_det_sign_svg(const std::string& path, const GridDomain& dom,
                        const std::vector<int>& region, const FieldExpr& g, const FieldExpr& f,
                        double lambda);
nlohmann::ordered_json to_json(const BifurcationWitness& w);
nlohmann::ordered_json to_json(const Remark1Report& r);

}  // namespace hull_lab::singularity
