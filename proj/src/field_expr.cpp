#include "hull_lab/field_expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace hull_lab::grid {

enum class Op : unsigned char {
  constant,
  var_x,
  var_y,
  add,
  sub,
  mul,
  div,
  pow,
  exp_fn,
  sin_fn,
  cos_fn,
  sqrt_fn,
};

struct Expr::Node {
  Op op = Op::constant;
  double value = 0.0;  // constant payload, or the exponent for pow
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_node(Op op, double value, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->value = value;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

bool const_value(const NodePtr& n, double* v) {
  if (n->op != Op::constant) return false;
  if (v) *v = n->value;
  return true;
}

double eval_node(const Expr::Node* n, double xv, double yv) {
  switch (n->op) {
    case Op::constant:
      return n->value;
    case Op::var_x:
      return xv;
    case Op::var_y:
      return yv;
    case Op::add:
      return eval_node(n->lhs.get(), xv, yv) + eval_node(n->rhs.get(), xv, yv);
    case Op::sub:
      return eval_node(n->lhs.get(), xv, yv) - eval_node(n->rhs.get(), xv, yv);
    case Op::mul:
      return eval_node(n->lhs.get(), xv, yv) * eval_node(n->rhs.get(), xv, yv);
    case Op::div:
      return eval_node(n->lhs.get(), xv, yv) / eval_node(n->rhs.get(), xv, yv);
    case Op::pow:
      return std::pow(eval_node(n->lhs.get(), xv, yv), n->value);
    case Op::exp_fn:
      return std::exp(eval_node(n->lhs.get(), xv, yv));
    case Op::sin_fn:
      return std::sin(eval_node(n->lhs.get(), xv, yv));
    case Op::cos_fn:
      return std::cos(eval_node(n->lhs.get(), xv, yv));
    case Op::sqrt_fn:
      return std::sqrt(eval_node(n->lhs.get(), xv, yv));
  }
  return 0.0;
}

}  // namespace

Expr::Expr() : node_(make_node(Op::constant, 0.0)) {}

Expr Expr::constant(double c) { return Expr(make_node(Op::constant, c)); }
Expr Expr::x() { return Expr(make_node(Op::var_x, 0.0)); }
Expr Expr::y() { return Expr(make_node(Op::var_y, 0.0)); }

bool Expr::is_constant(double* value) const { return const_value(node_, value); }

double Expr::eval(double xv, double yv) const { return eval_node(node_.get(), xv, yv); }

Expr operator+(const Expr& a, const Expr& b) {
  double ca, cb;
  const bool la = a.is_constant(&ca), lb = b.is_constant(&cb);
  if (la && lb) return Expr::constant(ca + cb);
  if (la && ca == 0.0) return b;
  if (lb && cb == 0.0) return a;
  return Expr(make_node(Op::add, 0.0, a.node_, b.node_));
}

Expr operator-(const Expr& a, const Expr& b) {
  double ca, cb;
  const bool la = a.is_constant(&ca), lb = b.is_constant(&cb);
  if (la && lb) return Expr::constant(ca - cb);
  if (lb && cb == 0.0) return a;
  return Expr(make_node(Op::sub, 0.0, a.node_, b.node_));
}

Expr operator*(const Expr& a, const Expr& b) {
  double ca, cb;
  const bool la = a.is_constant(&ca), lb = b.is_constant(&cb);
  if (la && lb) return Expr::constant(ca * cb);
  if (la) {
    if (ca == 0.0) return Expr::constant(0.0);
    if (ca == 1.0) return b;
  }
  if (lb) {
    if (cb == 0.0) return Expr::constant(0.0);
    if (cb == 1.0) return a;
  }
  return Expr(make_node(Op::mul, 0.0, a.node_, b.node_));
}

Expr operator/(const Expr& a, const Expr& b) {
  double ca, cb;
  const bool la = a.is_constant(&ca), lb = b.is_constant(&cb);
  if (lb && cb != 0.0) {
    if (la) return Expr::constant(ca / cb);
    if (cb == 1.0) return a;
  }
  if (la && ca == 0.0 && !(lb && cb == 0.0)) return Expr::constant(0.0);
  return Expr(make_node(Op::div, 0.0, a.node_, b.node_));
}

Expr operator-(const Expr& a) { return Expr::constant(0.0) - a; }

Expr Expr::pow(Expr base, double exponent) {
  if (exponent == 0.0) return Expr::constant(1.0);
  if (exponent == 1.0) return base;
  double cb;
  if (base.is_constant(&cb)) return Expr::constant(std::pow(cb, exponent));
  return Expr(make_node(Op::pow, exponent, base.node_));
}

Expr Expr::exp(Expr e) {
  double c;
  if (e.is_constant(&c)) return Expr::constant(std::exp(c));
  return Expr(make_node(Op::exp_fn, 0.0, e.node_));
}

Expr Expr::sin(Expr e) {
  double c;
  if (e.is_constant(&c)) return Expr::constant(std::sin(c));
  return Expr(make_node(Op::sin_fn, 0.0, e.node_));
}

Expr Expr::cos(Expr e) {
  double c;
  if (e.is_constant(&c)) return Expr::constant(std::cos(c));
  return Expr(make_node(Op::cos_fn, 0.0, e.node_));
}

Expr Expr::sqrt(Expr e) {
  double c;
  if (e.is_constant(&c)) return Expr::constant(std::sqrt(c));
  return Expr(make_node(Op::sqrt_fn, 0.0, e.node_));
}

struct ExprDetail {
  static Expr make(NodePtr n) { return Expr(std::move(n)); }
};

namespace {

Expr wrap(NodePtr n) { return ExprDetail::make(std::move(n)); }

Expr derive(const NodePtr& n, bool wrt_x) {
  const Expr dl = n->lhs ? derive(n->lhs, wrt_x) : Expr::constant(0.0);
  const Expr dr = n->rhs ? derive(n->rhs, wrt_x) : Expr::constant(0.0);
  const Expr l = n->lhs ? wrap(n->lhs) : Expr::constant(0.0);
  const Expr r = n->rhs ? wrap(n->rhs) : Expr::constant(0.0);
  switch (n->op) {
    case Op::constant:
      return Expr::constant(0.0);
    case Op::var_x:
      return Expr::constant(wrt_x ? 1.0 : 0.0);
    case Op::var_y:
      return Expr::constant(wrt_x ? 0.0 : 1.0);
    case Op::add:
      return dl + dr;
    case Op::sub:
      return dl - dr;
    case Op::mul:
      return dl * r + l * dr;
    case Op::div:
      return (dl * r - l * dr) / (r * r);
    case Op::pow:
      return Expr::constant(n->value) * Expr::pow(l, n->value - 1.0) * dl;
    case Op::exp_fn:
      return Expr::exp(l) * dl;
    case Op::sin_fn:
      return Expr::cos(l) * dl;
    case Op::cos_fn:
      return Expr::constant(-1.0) * Expr::sin(l) * dl;
    case Op::sqrt_fn:
      return dl / (Expr::constant(2.0) * Expr::sqrt(l));
  }
  return Expr::constant(0.0);
}

}  // namespace

Expr Expr::dx() const { return derive(node_, true); }
Expr Expr::dy() const { return derive(node_, false); }

Expr Expr::substitute(const Expr& x_repl, const Expr& y_repl) const {
  switch (node_->op) {
    case Op::constant:
      return *this;
    case Op::var_x:
      return x_repl;
    case Op::var_y:
      return y_repl;
    default:
      break;
  }
  const Expr l = node_->lhs ? Expr(node_->lhs).substitute(x_repl, y_repl) : Expr::constant(0.0);
  const Expr r = node_->rhs ? Expr(node_->rhs).substitute(x_repl, y_repl) : Expr::constant(0.0);
  switch (node_->op) {
    case Op::add:
      return l + r;
    case Op::sub:
      return l - r;
    case Op::mul:
      return l * r;
    case Op::div:
      return l / r;
    case Op::pow:
      return Expr::pow(l, node_->value);
    case Op::exp_fn:
      return Expr::exp(l);
    case Op::sin_fn:
      return Expr::sin(l);
    case Op::cos_fn:
      return Expr::cos(l);
    case Op::sqrt_fn:
      return Expr::sqrt(l);
    default:
      return *this;
  }
}

namespace {

std::string node_str(const Expr::Node* n) {
  std::ostringstream os;
  switch (n->op) {
    case Op::constant: {
      os.precision(17);
      os << n->value;
      break;
    }
    case Op::var_x:
      os << "x";
      break;
    case Op::var_y:
      os << "y";
      break;
    case Op::add:
      os << "(" << node_str(n->lhs.get()) << " + " << node_str(n->rhs.get()) << ")";
      break;
    case Op::sub:
      os << "(" << node_str(n->lhs.get()) << " - " << node_str(n->rhs.get()) << ")";
      break;
    case Op::mul:
      os << "(" << node_str(n->lhs.get()) << " * " << node_str(n->rhs.get()) << ")";
      break;
    case Op::div:
      os << "(" << node_str(n->lhs.get()) << " / " << node_str(n->rhs.get()) << ")";
      break;
    case Op::pow: {
      os.precision(17);
      os << node_str(n->lhs.get()) << "^" << n->value;
      break;
    }
    case Op::exp_fn:
      os << "exp(" << node_str(n->lhs.get()) << ")";
      break;
    case Op::sin_fn:
      os << "sin(" << node_str(n->lhs.get()) << ")";
      break;
    case Op::cos_fn:
      os << "cos(" << node_str(n->lhs.get()) << ")";
      break;
    case Op::sqrt_fn:
      os << "sqrt(" << node_str(n->lhs.get()) << ")";
      break;
  }
  return os.str();
}

// Recursive-descent infix parser with column tracking.
class Parser {
 public:
  Parser(std::string_view src, std::string_view var_x, std::string_view var_y)
      : src_(src), var_x_(var_x), var_y_(var_y) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ExprParseError(msg + " in '" + std::string(src_) + "'", static_cast<int>(pos_) + 1);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      if (consume('+')) {
        e = e + parse_term();
      } else if (consume('-')) {
        e = e - parse_term();
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_unary();
    for (;;) {
      if (consume('*')) {
        e = e * parse_unary();
      } else if (consume('/')) {
        e = e / parse_unary();
      } else {
        return e;
      }
    }
  }

  Expr parse_unary() {
    if (consume('-')) return Expr::constant(0.0) - parse_unary();
    if (consume('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (consume('^')) {
      const std::size_t at = pos_;
      Expr e = parse_unary();  // right-associative
      double c;
      if (!e.is_constant(&c)) {
        pos_ = at;
        fail("exponent must be a constant");
      }
      return Expr::pow(base, c);
    }
    return base;
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    if (consume('(')) {
      Expr e = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr parse_number() {
    const char* begin = src_.data() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("invalid number");
    pos_ += static_cast<std::size_t>(end - begin);
    return Expr::constant(v);
  }

  Expr parse_ident() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    if (!var_x_.empty() && name == var_x_) return Expr::x();
    if (!var_y_.empty() && name == var_y_) return Expr::y();
    if (name == "pi") return Expr::constant(3.14159265358979323846);
    if (name == "e") return Expr::constant(2.71828182845904523536);
    if (name == "pow") {
      if (!consume('(')) fail("expected '(' after pow");
      Expr base = parse_expr();
      if (!consume(',')) fail("expected ',' in pow");
      Expr exp_arg = parse_expr();
      if (!consume(')')) fail("expected ')' after pow");
      double c;
      if (!exp_arg.is_constant(&c)) fail("pow exponent must be a constant");
      return Expr::pow(base, c);
    }
    Expr (*fn)(Expr) = nullptr;
    if (name == "exp") fn = &Expr::exp;
    if (name == "sin") fn = &Expr::sin;
    if (name == "cos") fn = &Expr::cos;
    if (name == "sqrt") fn = &Expr::sqrt;
    if (fn) {
      if (!consume('(')) fail("expected '(' after function name");
      Expr arg = parse_expr();
      if (!consume(')')) fail("expected ')' after function argument");
      return fn(arg);
    }
    pos_ = start;
    fail("unknown identifier '" + std::string(name) + "'");
  }

  std::string_view src_;
  std::string_view var_x_, var_y_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr Expr::parse(std::string_view src, std::string_view var_x, std::string_view var_y) {
  return Parser(src, var_x, var_y).parse_all();
}

std::string Expr::str() const { return node_str(node_.get()); }

FieldExpr FieldExpr::scalar(Expr e) { return FieldExpr(std::vector<Expr>{std::move(e)}); }

FieldExpr FieldExpr::vector(Expr ex, Expr ey) {
  return FieldExpr(std::vector<Expr>{std::move(ex), std::move(ey)});
}

FieldExpr FieldExpr::parse(std::string_view src) {
  // A vector literal is a fully wrapping "(...)" with a comma at depth 1.
  std::size_t first = src.find_first_not_of(" \t");
  std::size_t last = src.find_last_not_of(" \t");
  if (first == std::string_view::npos) throw ExprParseError("empty field expression", 1);
  const std::string_view body = src.substr(first, last - first + 1);
  if (body.front() == '(' && body.back() == ')') {
    int depth = 0;
    std::size_t comma = std::string_view::npos;
    bool wraps = true;
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (body[i] == '(') ++depth;
      if (body[i] == ')') {
        --depth;
        if (depth == 0 && i + 1 != body.size()) wraps = false;
      }
      if (body[i] == ',' && depth == 1 && comma == std::string_view::npos) comma = i;
    }
    if (wraps && comma != std::string_view::npos) {
      Expr ex = Expr::parse(body.substr(1, comma - 1));
      Expr ey = Expr::parse(body.substr(comma + 1, body.size() - comma - 2));
      return vector(std::move(ex), std::move(ey));
    }
  }
  return scalar(Expr::parse(body));
}

std::vector<double> FieldExpr::eval(double xv, double yv) const {
  std::vector<double> out;
  out.reserve(comps_.size());
  for (const auto& c : comps_) out.push_back(c.eval(xv, yv));
  return out;
}

double FieldExpr::eval_scalar(double xv, double yv) const {
  if (comps_.size() != 1) throw ArityError("eval_scalar called on a vector field");
  return comps_[0].eval(xv, yv);
}

std::string FieldExpr::str() const {
  if (comps_.size() == 1) return comps_[0].str();
  return "(" + comps_[0].str() + ", " + comps_[1].str() + ")";
}

}  // namespace hull_lab::grid
