#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hull_lab/errors.hpp"

namespace hull_lab::grid {

struct ExprParseError : Error {
  int column = 0;
  ExprParseError(const std::string& msg, int col) : Error(msg), column(col) {}
};

// Immutable analytic expression tree over {constants, x, y, +, -, *, /,
// pow (constant exponent), exp, sin, cos, sqrt}. Construction folds
// constants and drops arithmetic identities so derivative trees stay small.
class Expr {
 public:
  Expr();  // constant 0

  static Expr constant(double c);
  static Expr x();
  static Expr y();
  static Expr pow(Expr base, double exponent);
  static Expr exp(Expr e);
  static Expr sin(Expr e);
  static Expr cos(Expr e);
  static Expr sqrt(Expr e);

  // Parses infix syntax, e.g. "1 - x^2 - y^2" or "sin(x*y) / (2 + x)".
  // var_x / var_y name the admissible variables; pass "" to forbid one
  // (used for univariate profiles F(t)).
  static Expr parse(std::string_view src, std::string_view var_x = "x",
                    std::string_view var_y = "y");

  double eval(double xv, double yv) const;
  Expr dx() const;
  Expr dy() const;

  // Replaces the x / y leaves; composition F(t) |-> F(beta) is
  // parse(F, "t").substitute(beta, beta).
  Expr substitute(const Expr& x_repl, const Expr& y_repl) const;

  bool is_constant(double* value = nullptr) const;
  std::string str() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

  struct Node;
  friend struct ExprDetail;

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// A scalar or planar vector field: 1 or 2 expression components.
class FieldExpr {
 public:
  FieldExpr() : comps_{Expr::constant(0.0)} {}
  static FieldExpr scalar(Expr e);
  static FieldExpr vector(Expr ex, Expr ey);

  // "(e1, e2)" with a top-level comma parses as a vector field, anything
  // else as a scalar.
  static FieldExpr parse(std::string_view src);

  int output_dim() const { return static_cast<int>(comps_.size()); }
  const Expr& component(int i) const { return comps_.at(i); }

  std::vector<double> eval(double xv, double yv) const;
  double eval_scalar(double xv, double yv) const;

  std::string str() const;

 private:
  explicit FieldExpr(std::vector<Expr> comps) : comps_(std::move(comps)) {}
  std::vector<Expr> comps_;
};

}  // namespace hull_lab::grid
