#include "pcl/force.hpp"

#include <cctype>
#include <cmath>

#include "pcl/errors.hpp"

namespace pcl {

namespace expr {

enum class Op { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Sqrt, Abs };

struct Node {
  Op op;
  double value = 0.0;
  char var = 0;
  NodePtr a, b;
};

namespace {

struct Parser {
  const std::string& s;
  std::size_t pos = 0;

  explicit Parser(const std::string& text) : s(text) {}

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  NodePtr expression() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+'))
        lhs = make(Op::Add, lhs, term());
      else if (eat('-'))
        lhs = make(Op::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat('*'))
        lhs = make(Op::Mul, lhs, unary());
      else if (eat('/'))
        lhs = make(Op::Div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make(Op::Neg, unary());
    (void)eat('+');
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (eat('^')) return make(Op::Pow, base, unary());
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos >= s.size()) throw Error(ErrorCode::InvalidConfig, "truncated expression");
    const char c = s[pos];
    if (c == '(') {
      ++pos;
      NodePtr e = expression();
      if (!eat(')')) throw Error(ErrorCode::InvalidConfig, "missing ')' in expression");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      const double v = std::stod(s.substr(pos), &used);
      pos += used;
      auto n = make(Op::Num);
      const_cast<Node*>(n.get())->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos;
      while (end < s.size() && std::isalpha(static_cast<unsigned char>(s[end]))) ++end;
      const std::string name = s.substr(pos, end - pos);
      pos = end;
      if (name == "x" || name == "y" || name == "r") {
        auto n = make(Op::Var);
        const_cast<Node*>(n.get())->var = name[0];
        return n;
      }
      if (name == "pi") {
        auto n = make(Op::Num);
        const_cast<Node*>(n.get())->value = M_PI;
        return n;
      }
      Op op;
      if (name == "sin")
        op = Op::Sin;
      else if (name == "cos")
        op = Op::Cos;
      else if (name == "exp")
        op = Op::Exp;
      else if (name == "sqrt")
        op = Op::Sqrt;
      else if (name == "abs")
        op = Op::Abs;
      else
        throw Error(ErrorCode::InvalidConfig, "unknown name in expression: " + name);
      if (!eat('(')) throw Error(ErrorCode::InvalidConfig, "expected '(' after " + name);
      NodePtr arg = expression();
      if (!eat(')')) throw Error(ErrorCode::InvalidConfig, "missing ')' after " + name);
      return make(op, arg);
    }
    throw Error(ErrorCode::InvalidConfig, std::string("unexpected character '") + c +
                                              "' in expression");
  }
};

}  // namespace

NodePtr parse(const std::string& text) {
  Parser p(text);
  NodePtr root = p.expression();
  p.skip();
  if (p.pos != text.size())
    throw Error(ErrorCode::InvalidConfig, "trailing junk in expression: " + text);
  return root;
}

double eval(const NodePtr& n, double x, double y) {
  switch (n->op) {
    case Op::Num: return n->value;
    case Op::Var:
      if (n->var == 'x') return x;
      if (n->var == 'y') return y;
      return std::hypot(x, y);
    case Op::Add: return eval(n->a, x, y) + eval(n->b, x, y);
    case Op::Sub: return eval(n->a, x, y) - eval(n->b, x, y);
    case Op::Mul: return eval(n->a, x, y) * eval(n->b, x, y);
    case Op::Div: return eval(n->a, x, y) / eval(n->b, x, y);
    case Op::Pow: return std::pow(eval(n->a, x, y), eval(n->b, x, y));
    case Op::Neg: return -eval(n->a, x, y);
    case Op::Sin: return std::sin(eval(n->a, x, y));
    case Op::Cos: return std::cos(eval(n->a, x, y));
    case Op::Exp: return std::exp(eval(n->a, x, y));
    case Op::Sqrt: return std::sqrt(eval(n->a, x, y));
    case Op::Abs: return std::abs(eval(n->a, x, y));
  }
  return 0.0;
}

}  // namespace expr

double ForceSpec::operator()(const Vec2& p) const {
  if (const auto* c = std::get_if<Constant>(&kind)) return c->value;
  if (const auto* r = std::get_if<Radial>(&kind)) {
    if (r->profile.empty()) return 0.0;
    const double s = (p - r->center).norm();
    if (s <= r->profile.front().first) return r->profile.front().second;
    for (std::size_t k = 1; k < r->profile.size(); ++k) {
      if (s <= r->profile[k].first) {
        const auto& [s0, v0] = r->profile[k - 1];
        const auto& [s1, v1] = r->profile[k];
        const double t = (s - s0) / (s1 - s0);
        return v0 + t * (v1 - v0);
      }
    }
    return r->profile.back().second;
  }
  if (const auto* g = std::get_if<Grid>(&kind)) {
    if (g->nx < 2 || g->ny < 2) return 0.0;
    const double fx = std::clamp((p.x() - g->origin.x()) / g->dx, 0.0, g->nx - 1.000001);
    const double fy = std::clamp((p.y() - g->origin.y()) / g->dy, 0.0, g->ny - 1.000001);
    const int i = static_cast<int>(fx);
    const int j = static_cast<int>(fy);
    const double tx = fx - i, ty = fy - j;
    auto at = [&](int ii, int jj) { return g->values[jj * g->nx + ii]; };
    return (1 - tx) * (1 - ty) * at(i, j) + tx * (1 - ty) * at(i + 1, j) +
           (1 - tx) * ty * at(i, j + 1) + tx * ty * at(i + 1, j + 1);
  }
  const auto& e = std::get<Expression>(kind);
  return expr::eval(e.ast, p.x(), p.y());
}

bool ForceSpec::is_zero() const {
  if (const auto* c = std::get_if<Constant>(&kind)) return c->value == 0.0;
  return false;
}

ForceSpec make_constant_force(double value, double q) {
  ForceSpec f;
  f.kind = ForceSpec::Constant{value};
  f.q = q;
  return f;
}

ForceSpec make_expression_force(const std::string& text, double q) {
  ForceSpec f;
  f.kind = ForceSpec::Expression{text, expr::parse(text)};
  f.q = q;
  return f;
}

}  // namespace pcl
