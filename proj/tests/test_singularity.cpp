#include <fstream>
#include <cmath>
#include <random>

#include "doctest.h"

#include "hull_lab/singularity.hpp"

using namespace hull_lab;
using grid::Expr;
using grid::FieldExpr;
using grid::GridDomain;
namespace hp = hull_lab::hull_property;
namespace sg = hull_lab::singularity;

namespace {

GridDomain unit_disk(int n) {
  return grid::build_grid(-1, 1, -1, 1, n, n, Expr::parse("1 - x^2 - y^2"));
}

FieldExpr zero_field() {
  return FieldExpr::vector(Expr::constant(0.0), Expr::constant(0.0));
}

Expr random_poly(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> degree(0, 2), nterms(2, 4);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Expr e = Expr::constant(0.0);
  for (int t = 0, n = nterms(rng); t < n; ++t)
    e = e + Expr::constant(coef(rng)) * Expr::pow(Expr::x(), degree(rng)) *
                Expr::pow(Expr::y(), degree(rng));
  return e;
}

}  // namespace

TEST_SUITE("singularity") {

TEST_CASE("quadratic coefficients for the rotation companion") {
  // f = grad((x^2+y^2)/2) = (x, y); g = (-y, x).
  const FieldExpr f = FieldExpr::parse("(x, y)");
  const FieldExpr g = FieldExpr::parse("(0 - y, x)");
  const sg::QuadraticDetCoeffs q = sg::det_quadratic(f, g, {0.3, -0.7});
  CHECK(q.a == doctest::Approx(1.0));
  CHECK(q.b == doctest::Approx(0.0));
  CHECK(q.c == doctest::Approx(1.0));
  CHECK(q.eval(3.0) == doctest::Approx(10.0));
}

TEST_CASE("zero field degenerates to the g determinant") {
  const FieldExpr g = FieldExpr::parse("(x + 2*y, 3*x - y)");
  const sg::QuadraticDetCoeffs q = sg::det_quadratic(zero_field(), g, {0.1, 0.9});
  CHECK(q.a == 0.0);
  CHECK(q.b == 0.0);
  CHECK(q.c == doctest::Approx(-7.0));
}

TEST_CASE("quadratic identity matches the direct determinant") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> pt(-1.0, 1.0), lam(-2.0, 2.0);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const FieldExpr f = FieldExpr::vector(random_poly(rng), random_poly(rng));
    const FieldExpr g = FieldExpr::vector(random_poly(rng), random_poly(rng));
    for (int p = 0; p < 20; ++p) {
      const Vec2 at = {pt(rng), pt(rng)};
      const auto q = sg::det_quadratic(f, g, at);
      const auto jf = grid::jacobian(f, at);
      const auto jg = grid::jacobian(g, at);
      for (int l = 0; l < 5; ++l) {
        const double lambda = lam(rng);
        const double direct =
            (jg.m[0][0] + lambda * jf.m[0][0]) * (jg.m[1][1] + lambda * jf.m[1][1]) -
            (jg.m[0][1] + lambda * jf.m[0][1]) * (jg.m[1][0] + lambda * jf.m[1][0]);
        worst = std::max(worst, std::fabs(q.eval(lambda) - direct));
      }
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("sweep finds the moving zero curve on the disk") {
  const GridDomain dom = unit_disk(101);
  const FieldExpr f = FieldExpr::parse("(1 - x^2 - y^2, 0)");
  const FieldExpr g = FieldExpr::parse("(x, y)");
  // Restrict to the grid disk of radius 0.45, the certificate region scale.
  std::vector<int> region;
  for (int id : dom.interior)
    if (norm(dom.at(id)) < 0.45) region.push_back(id);

  const sg::SingularSweepResult res =
      sg::singular_sweep(g, f, dom, region, 0.5, 50.0, 13, 1e-6);
  REQUIRE(res.samples.size() == 13);
  for (const auto& s : res.samples) {
    // det(J_{g + lambda f}) = 1 - 2 lambda x: a zero lives in the region iff
    // 1/(2 lambda) < 0.45.
    const bool zero_inside = 1.0 / (2.0 * s.lambda) < 0.45 - dom.spacing();
    if (zero_inside) CHECK(s.certified);
    if (1.0 / (2.0 * s.lambda) > 0.45 + dom.spacing()) CHECK_FALSE(s.certified);
    // Exact minimum over the region of |1 - 2 lambda x|.
    double expect = 1e300;
    for (int id : region) expect = std::min(expect, std::fabs(1.0 - 2.0 * s.lambda * dom.at(id).x));
    CHECK(s.min_abs_det == doctest::Approx(expect).epsilon(1e-12));
  }
  REQUIRE(res.first_certified.has_value());
  CHECK(*res.first_certified < 2.0);
}

TEST_CASE("positive-determinant fields never certify under pure scaling") {
  const GridDomain sq = grid::build_grid_box(-1, 1, -1, 1, 41, 41);
  const FieldExpr f = FieldExpr::parse("(x + 0.1*y, y)");  // det J = 1 everywhere
  const sg::SingularSweepResult res =
      sg::singular_sweep(zero_field(), f, sq, sq.interior, 0.25, 8.0, 10, 1e-9);
  for (const auto& s : res.samples) {
    CHECK_FALSE(s.certified);
    CHECK(s.min_abs_det >= s.lambda * s.lambda * (1.0 - 1e-12));
  }
  CHECK_FALSE(res.first_certified.has_value());
}

TEST_CASE("system guard: b = 0 and h c >= 0 forbids zeros") {
  const GridDomain sq = grid::build_grid_box(-1, 1, -1, 1, 51, 51);
  const FieldExpr g = FieldExpr::parse("(0 - y, x)");
  const Expr potentials[] = {
      Expr::parse("(x^2 + y^2) / 2"),
      Expr::parse("exp((x^2 + y^2) / 2)"),
      Expr::parse("x^4 + y^4"),  // degenerate h = 144 x^2 y^2 vanishing on the axes
  };
  for (const Expr& w : potentials) {
    const FieldExpr f = FieldExpr::vector(w.dx(), w.dy());
    // b vanishes identically for gradient fields paired with the rotation.
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    for (int k = 0; k < 50; ++k) {
      const auto q = sg::det_quadratic(f, g, {u(rng), u(rng)});
      CHECK(std::fabs(q.b) <= 1e-12);
      CHECK(q.c == doctest::Approx(1.0));
      CHECK(q.a >= -1e-12);
    }
    const auto res = sg::singular_sweep(g, f, sq, sq.interior, 0.0, 100.0, 26, 0.5);
    CHECK_FALSE(res.first_certified.has_value());
    for (const auto& s : res.samples) CHECK(s.min_abs_det >= 1.0);
  }
}

TEST_CASE("preimage counting") {
  const GridDomain disk = unit_disk(101);

  SUBCASE("identity has one preimage at interior targets") {
    const FieldExpr ident = FieldExpr::parse("(x, y)");
    // tol_y must cover the gap to the nearest lattice node.
    const double tol_y = 2.0 * disk.spacing();
    for (const Vec2 target : {Vec2{0.0, 0.0}, Vec2{0.31, -0.17}, Vec2{-0.42, 0.55}}) {
      const auto res = sg::preimage_count(ident, target, disk, disk.interior, 0.2, tol_y);
      REQUIRE(res.count == 1);
      CHECK_FALSE(res.non_isolated);
      CHECK(dist(res.solutions[0], target) <= 1e-9);
    }
  }
  SUBCASE("level circles are flagged non-isolated") {
    const FieldExpr f = FieldExpr::parse("(1 - x^2 - y^2, 0)");
    // target (1/2, 0): solutions form the circle r^2 = 1/2.
    const auto res = sg::preimage_count(f, {0.5, 0.0}, disk, disk.interior, 0.05, 2e-2);
    CHECK(res.non_isolated);
    CHECK(res.count >= 1);
    for (const auto& sol : res.solutions)
      CHECK(norm(sol) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-4));
  }
  SUBCASE("targets off the image have no preimage") {
    const FieldExpr f = FieldExpr::parse("(1 - x^2 - y^2, 0)");
    const auto res = sg::preimage_count(f, {0.0, 1.0}, disk, disk.interior, 0.05, 1e-3);
    CHECK(res.count == 0);
    CHECK(res.clusters.empty());
  }
  SUBCASE("unresolvable clusters raise a count-uncertain error") {
    // The residual to (0, 0) has a strict positive floor of 0.01, so nodes
    // within tol_y = 0.02 form clusters whose refinement cannot reach
    // tol_y / 100.
    const FieldExpr f = FieldExpr::parse("(x^2 + 0.01, y)");
    CHECK_THROWS_AS(
        (void)sg::preimage_count(f, {0.0, 0.0}, disk, disk.interior, 0.5, 0.02),
        sg::CountUncertainError);
    try {
      (void)sg::preimage_count(f, {0.0, 0.0}, disk, disk.interior, 0.5, 0.02);
    } catch (const sg::CountUncertainError& e) {
      CHECK(e.clusters.size() >= 1);  // raw clusters travel with the error
      CHECK(e.clusters[0].refined_residual >= 0.0099);
    }
  }
}

TEST_CASE("det sign field svg renders") {
  const GridDomain sq = grid::build_grid_box(-1, 1, -1, 1, 31, 31);
  const FieldExpr f = FieldExpr::parse("(1 - x^2 - y^2, 0)");
  const FieldExpr g = FieldExpr::parse("(x, y)");
  sg::write_det_sign_svg("det_sign_test.svg", sq, sq.interior, g, f, 3.0);
  std::ifstream in("det_sign_test.svg");
  REQUIRE(in.good());
  std::string first;
  std::getline(in, first);
  CHECK(first.find("<svg") != std::string::npos);
}

TEST_CASE("arc regression case") {
  for (double lambda : {0.5, 1.0, 2.0}) {
    const auto rep = sg::remark1_case(lambda, 1000);
    CHECK(rep.injective);
    CHECK(rep.min_pairwise_distance > 1e-12);
    CHECK(rep.hull_violation == doctest::Approx(lambda).epsilon(1e-9));
    CHECK(rep.domain_dim == 1);
    CHECK(rep.codomain_dim == 2);
    CHECK_FALSE(rep.dims_match);
  }
  const auto degenerate = sg::remark1_case(0.0, 100);
  CHECK_FALSE(degenerate.injective);
  CHECK(degenerate.hull_violation == doctest::Approx(0.0));
}

TEST_CASE("bifurcation witnesses on the disk") {
  const GridDomain dom = unit_disk(201);
  const FieldExpr f = FieldExpr::parse("(1 - x^2 - y^2, 0)");
  const auto cert = dichotomy::build_certificate(
      f, dom, hp::QuasiConvexProbe::linear({1.0, 0.0}), 10.0 * dom.spacing());
  const auto wit =
      sg::bifurcation_scan(zero_field(), f, dom, cert, 1.0, 0.4, 4, 4.0 * dom.spacing(), 1e-8);
  REQUIRE(wit.levels.size() == 4);
  for (const auto& lev : wit.levels) {
    CHECK(lev.no_preimage_ok);
    CHECK(lev.collision_ok);
    REQUIRE(lev.collision.has_value());
    CHECK(lev.collision->residual_u <= 1e-8);
    CHECK(lev.collision->residual_v <= 1e-8);
    CHECK(dist(lev.collision->u, lev.collision->v) >= dom.spacing());
    // Both preimages sit inside the shrinking ball.
    const Vec2 xhat = dom.at(wit.support_node);
    CHECK(dist(lev.collision->u, xhat) <= lev.radius + 3.0 * dom.spacing());
    CHECK(dist(lev.collision->v, xhat) <= lev.radius + 3.0 * dom.spacing());
  }
  // z_k and y_k approach the supported image value as k grows.
  for (std::size_t k = 1; k < wit.levels.size(); ++k)
    CHECK(wit.levels[k].eps <= wit.levels[k - 1].eps);
}

TEST_CASE("sweep results export to csv") {
  const GridDomain sq = grid::build_grid_box(-1, 1, -1, 1, 21, 21);
  const FieldExpr f = FieldExpr::parse("(x, y)");
  const auto res = sg::singular_sweep(zero_field(), f, sq, sq.interior, 0.5, 2.0, 4, 1e-9);
  const std::string path = "sweep_test.csv";
  sg::write_sweep_csv(path, res, sq);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "lambda,min_abs_det,argmin_x,argmin_y,sign_change,certified");
  int rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 4);
}

}  // TEST_SUITE
