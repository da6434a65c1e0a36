#include <cmath>
#include <random>

#include "doctest.h"

#include "hull_lab/field_expr.hpp"

using hull_lab::grid::Expr;
using hull_lab::grid::ExprParseError;
using hull_lab::grid::FieldExpr;

TEST_SUITE("field_expr") {

TEST_CASE("parses and evaluates basic expressions") {
  CHECK(Expr::parse("1 + 2 * 3").eval(0, 0) == doctest::Approx(7.0));
  CHECK(Expr::parse("x^2 + y^2").eval(3, 4) == doctest::Approx(25.0));
  CHECK(Expr::parse("-x^2").eval(2, 0) == doctest::Approx(-4.0));
  CHECK(Expr::parse("2 / (1 + x)").eval(1, 0) == doctest::Approx(1.0));
  CHECK(Expr::parse("sin(pi / 2)").eval(0, 0) == doctest::Approx(1.0));
  CHECK(Expr::parse("sqrt(x^2)").eval(-3, 0) == doctest::Approx(3.0));
  CHECK(Expr::parse("pow(x, 3)").eval(2, 0) == doctest::Approx(8.0));
  CHECK(Expr::parse("exp(0)").eval(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("vector fields parse from a top-level comma") {
  const FieldExpr f = FieldExpr::parse("(1 - x^2 - y^2, 0)");
  REQUIRE(f.output_dim() == 2);
  const auto v = f.eval(0.5, 0.0);
  CHECK(v[0] == doctest::Approx(0.75));
  CHECK(v[1] == doctest::Approx(0.0));

  // Parenthesized scalars are not vectors.
  CHECK(FieldExpr::parse("(x + y) * 2").output_dim() == 1);
  CHECK(FieldExpr::parse("(x + y)").output_dim() == 1);

  const FieldExpr arc = FieldExpr::parse("(cos(x), sin(x))");
  const auto a = arc.eval(0.0, 0.0);
  CHECK(a[0] == doctest::Approx(1.0));
  CHECK(a[1] == doctest::Approx(0.0));

  const FieldExpr poly = FieldExpr::parse("(x^2, x*y)");
  const auto p = poly.eval(2.0, 3.0);
  CHECK(p[0] == doctest::Approx(4.0));
  CHECK(p[1] == doctest::Approx(6.0));
}

TEST_CASE("symbolic derivatives match finite differences") {
  const char* exprs[] = {
      "x^2 * y - y^3 / 3",
      "exp((x^2 + y^2) / 2)",
      "sin(x * y) + cos(x - y)",
      "sqrt(1 + x^2 + y^2)",
      "x / (2 + y)",
      "pow(1 + x^2, 2.5)",
  };
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (const char* src : exprs) {
    const Expr e = Expr::parse(src);
    const Expr ex = e.dx(), ey = e.dy();
    for (int k = 0; k < 25; ++k) {
      const double x = u(rng), y = u(rng);
      const double h = 1e-5;
      const double fdx = (e.eval(x + h, y) - e.eval(x - h, y)) / (2 * h);
      const double fdy = (e.eval(x, y + h) - e.eval(x, y - h)) / (2 * h);
      CHECK(ex.eval(x, y) == doctest::Approx(fdx).epsilon(1e-6));
      CHECK(ey.eval(x, y) == doctest::Approx(fdy).epsilon(1e-6));
    }
  }
}

TEST_CASE("substitution composes profiles with planar expressions") {
  const Expr profile = Expr::parse("sin(t) + t^2", "t", "");
  const Expr beta = Expr::parse("x^2 + y^2");
  const Expr u = profile.substitute(beta, beta);
  const double r2 = 0.34;
  CHECK(u.eval(0.3, 0.5) == doctest::Approx(std::sin(r2) + r2 * r2));

  // Chain rule flows through the composition.
  CHECK(u.dx().eval(0.3, 0.5) ==
        doctest::Approx((std::cos(r2) + 2 * r2) * 2 * 0.3));
}

TEST_CASE("parse errors carry a column") {
  CHECK_THROWS_AS(Expr::parse("1 + * 2"), ExprParseError);
  CHECK_THROWS_AS(Expr::parse("sin(x"), ExprParseError);
  CHECK_THROWS_AS(Expr::parse("x ^ y"), ExprParseError);  // exponent must be constant
  CHECK_THROWS_AS(Expr::parse("frob(x)"), ExprParseError);
  CHECK_THROWS_AS(Expr::parse("t + 1"), ExprParseError);  // unknown variable here
  try {
    Expr::parse("1 + (2 ");
    CHECK(false);
  } catch (const ExprParseError& e) {
    CHECK(e.column > 0);
  }
}

TEST_CASE("round-trips through str()") {
  for (const char* src : {"x^2 + y^2", "(1 - x) / (1 + y)", "exp(x) * sin(y)"}) {
    const Expr e = Expr::parse(src);
    const Expr back = Expr::parse(e.str());
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 10; ++k) {
      const double x = u(rng), y = u(rng);
      CHECK(e.eval(x, y) == doctest::Approx(back.eval(x, y)).epsilon(1e-14));
    }
  }
}

}  // TEST_SUITE
