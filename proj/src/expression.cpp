#include "hpafem/expression.hpp"

#include <cctype>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

#include "hpafem/error.hpp"

namespace hpafem {

namespace {

struct Dual {
  double v;
  double d;
};

enum class Op { Num, X, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log, Sqrt, Abs };

}  // namespace

struct Expression::Node {
  Op op = Op::Num;
  double num = 0.0;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double num = 0.0) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  n->num = num;
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::Parse, fmt::format("{} at column {} in '{}'", what, pos_ + 1, s_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(fmt::format("expected '{}'", c));
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) {
        n = make(Op::Add, n, term());
      } else if (accept('-')) {
        n = make(Op::Sub, n, term());
      } else {
        return n;
      }
    }
  }
  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) {
        n = make(Op::Mul, n, unary());
      } else if (accept('/')) {
        n = make(Op::Div, n, unary());
      } else {
        return n;
      }
    }
  }
  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }
  // Right associative; binds tighter than unary minus on the left.
  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Op::Pow, base, unary());
    return base;
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = expr();
      expect(')');
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return call();
    fail("unexpected character");
  }
  NodePtr number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return make(Op::Num, nullptr, nullptr, v);
  }
  NodePtr call() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string name = s_.substr(start, pos_ - start);
    if (name == "x") return make(Op::X);
    if (name == "pi") return make(Op::Num, nullptr, nullptr, std::numbers::pi);
    if (name == "e") return make(Op::Num, nullptr, nullptr, std::numbers::e);
    Op op;
    if (name == "pow") {
      expect('(');
      NodePtr a = expr();
      expect(',');
      NodePtr b = expr();
      expect(')');
      return make(Op::Pow, a, b);
    } else if (name == "sin") {
      op = Op::Sin;
    } else if (name == "cos") {
      op = Op::Cos;
    } else if (name == "exp") {
      op = Op::Exp;
    } else if (name == "log") {
      op = Op::Log;
    } else if (name == "sqrt") {
      op = Op::Sqrt;
    } else if (name == "abs") {
      op = Op::Abs;
    } else {
      pos_ = start;
      fail(fmt::format("unknown identifier '{}'", name));
    }
    expect('(');
    NodePtr a = expr();
    expect(')');
    return make(op, a);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

Dual eval(const Expression::Node& n, double x) {
  switch (n.op) {
    case Op::Num:
      return {n.num, 0.0};
    case Op::X:
      return {x, 1.0};
    case Op::Neg: {
      const Dual a = eval(*n.a, x);
      return {-a.v, -a.d};
    }
    case Op::Add: {
      const Dual a = eval(*n.a, x), b = eval(*n.b, x);
      return {a.v + b.v, a.d + b.d};
    }
    case Op::Sub: {
      const Dual a = eval(*n.a, x), b = eval(*n.b, x);
      return {a.v - b.v, a.d - b.d};
    }
    case Op::Mul: {
      const Dual a = eval(*n.a, x), b = eval(*n.b, x);
      return {a.v * b.v, a.d * b.v + a.v * b.d};
    }
    case Op::Div: {
      const Dual a = eval(*n.a, x), b = eval(*n.b, x);
      return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
    }
    case Op::Pow: {
      const Dual a = eval(*n.a, x), b = eval(*n.b, x);
      const double v = std::pow(a.v, b.v);
      double d = 0.0;
      if (a.d != 0.0) d += (b.v == 0.0 ? 0.0 : b.v * std::pow(a.v, b.v - 1.0) * a.d);
      if (b.d != 0.0) d += v * std::log(a.v) * b.d;
      return {v, d};
    }
    case Op::Sin: {
      const Dual a = eval(*n.a, x);
      return {std::sin(a.v), std::cos(a.v) * a.d};
    }
    case Op::Cos: {
      const Dual a = eval(*n.a, x);
      return {std::cos(a.v), -std::sin(a.v) * a.d};
    }
    case Op::Exp: {
      const Dual a = eval(*n.a, x);
      const double v = std::exp(a.v);
      return {v, v * a.d};
    }
    case Op::Log: {
      const Dual a = eval(*n.a, x);
      return {std::log(a.v), a.d / a.v};
    }
    case Op::Sqrt: {
      const Dual a = eval(*n.a, x);
      const double v = std::sqrt(a.v);
      return {v, a.d == 0.0 ? 0.0 : 0.5 * a.d / v};
    }
    case Op::Abs: {
      const Dual a = eval(*n.a, x);
      return {std::abs(a.v), a.v > 0.0 ? a.d : (a.v < 0.0 ? -a.d : 0.0)};
    }
  }
  return {0.0, 0.0};
}

std::optional<double> constant_of(const Expression::Node& n) {
  switch (n.op) {
    case Op::Num:
      return n.num;
    case Op::X:
      return std::nullopt;
    default:
      break;
  }
  const auto a = n.a ? constant_of(*n.a) : std::optional<double>(0.0);
  const auto b = n.b ? constant_of(*n.b) : std::optional<double>(0.0);
  if (!a || !b) return std::nullopt;
  return eval(n, 0.0).v;
}

int degree_of(const Expression::Node& n) {
  if (constant_of(n)) return 0;
  switch (n.op) {
    case Op::X:
      return 1;
    case Op::Neg:
      return degree_of(*n.a);
    case Op::Add:
    case Op::Sub: {
      const int a = degree_of(*n.a), b = degree_of(*n.b);
      return (a < 0 || b < 0) ? -1 : std::max(a, b);
    }
    case Op::Mul: {
      const int a = degree_of(*n.a), b = degree_of(*n.b);
      return (a < 0 || b < 0) ? -1 : a + b;
    }
    case Op::Div:
      return constant_of(*n.b) ? degree_of(*n.a) : -1;
    case Op::Pow: {
      const auto e = constant_of(*n.b);
      const int a = degree_of(*n.a);
      if (!e || a < 0 || *e < 0.0 || *e != std::floor(*e) || *e > 1000.0) return -1;
      return a * static_cast<int>(*e);
    }
    default:
      return -1;
  }
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.text_ = text;
  Parser p(text);
  e.root_ = p.parse();
  return e;
}

double Expression::value(double x) const { return eval(*root_, x).v; }

std::pair<double, double> Expression::value_and_derivative(double x) const {
  const Dual d = eval(*root_, x);
  return {d.v, d.d};
}

int Expression::polynomial_degree() const { return degree_of(*root_); }

Function Expression::to_function(std::vector<double> kinks, std::vector<double> singular) const {
  const auto root = root_;
  if (auto c = constant_of(*root)) return Function::constant(*c);
  Function f([root](double x) { return eval(*root, x).v; }, [root](double x) { return eval(*root, x).d; },
             std::move(kinks), std::move(singular));
  f.set_piece_degree(degree_of(*root));
  return f;
}

}  // namespace hpafem
