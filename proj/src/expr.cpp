#include "dqm/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "dqm/errors.hpp"

namespace dqm {

namespace {

struct FuncName {
  std::string_view name;
  Func func;
};
constexpr std::array<FuncName, 6> kFuncs{{{"sin", Func::Sin},
                                          {"cos", Func::Cos},
                                          {"exp", Func::Exp},
                                          {"log", Func::Log},
                                          {"sqrt", Func::Sqrt},
                                          {"abs", Func::Abs}}};

std::string_view func_name(Func f) {
  for (const auto& fn : kFuncs) {
    if (fn.func == f) return fn.name;
  }
  return "?";
}

std::optional<Symbol> lookup_symbol(std::string_view name) {
  if (name == "x") return Symbol::X;
  if (name == "eps") return Symbol::Eps;
  if (name.size() == 2 && name[0] == 'y' && name[1] >= '0' && name[1] <= '4') {
    return derivative_symbol(name[1] - '0');
  }
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse_all() {
    skip_ws();
    if (pos_ >= src_.size()) syntax("empty expression");
    Expr e = parse_expr();
    skip_ws();
    if (pos_ < src_.size()) syntax(std::string("unexpected '") + src_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void syntax(const std::string& msg) const {
    throw ParseError(ParseError::Kind::Syntax, pos_, "syntax error: " + msg);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = Expr::binary(BinaryOp::Add, lhs, parse_term(), at);
      } else if (accept('-')) {
        lhs = Expr::binary(BinaryOp::Sub, lhs, parse_term(), at);
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = Expr::binary(BinaryOp::Mul, lhs, parse_factor(), at);
      } else if (accept('/')) {
        lhs = Expr::binary(BinaryOp::Div, lhs, parse_factor(), at);
      } else {
        return lhs;
      }
    }
  }

  Expr parse_factor() {
    skip_ws();
    const std::size_t at = pos_;
    if (accept('-')) return Expr::negate(parse_factor(), at);
    Expr base = parse_atom();
    skip_ws();
    const std::size_t pow_at = pos_;
    if (accept('^')) return Expr::binary(BinaryOp::Pow, base, parse_factor(), pow_at);
    return base;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) syntax("unexpected end of input");
    const std::size_t at = pos_;
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      if (!accept(')')) syntax("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) {
        ++end;
      }
      const std::string_view name = src_.substr(pos_, end - pos_);
      pos_ = end;
      skip_ws();
      if (pos_ < src_.size() && src_[pos_] == '(') {
        for (const auto& fn : kFuncs) {
          if (fn.name == name) {
            ++pos_;
            Expr arg = parse_expr();
            if (!accept(')')) syntax("expected ')' after function argument");
            return Expr::call(fn.func, arg, at);
          }
        }
        throw ParseError(ParseError::Kind::UnknownSymbol, at,
                         "unknown function '" + std::string(name) + "'");
      }
      for (const auto& fn : kFuncs) {
        if (fn.name == name) syntax("expected '(' after '" + std::string(name) + "'");
      }
      if (name == "pi") return Expr::number(std::numbers::pi, at);
      if (auto s = lookup_symbol(name)) return Expr::symbol(*s, at);
      throw ParseError(ParseError::Kind::UnknownSymbol, at,
                       "unknown symbol '" + std::string(name) + "'");
    }
    syntax(std::string("unexpected '") + c + "'");
  }

  Expr parse_number() {
    const std::size_t at = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
    };
    digits();
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      digits();
    }
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t exp_end = end + 1;
      if (exp_end < src_.size() && (src_[exp_end] == '+' || src_[exp_end] == '-')) ++exp_end;
      if (exp_end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[exp_end]))) {
        end = exp_end;
        digits();
      }
    }
    double v = 0;
    const auto res = std::from_chars(src_.data() + at, src_.data() + end, v);
    if (res.ec != std::errc() || res.ptr != src_.data() + end) syntax("malformed number");
    pos_ = end;
    return Expr::number(v, at);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

template <typename Scalar>
[[noreturn]] void domain(const ExprNode& n, const std::string& msg) {
  throw EvalError(EvalError::Kind::Domain, n.position, "domain violation: " + msg);
}

template <typename Scalar>
Scalar checked(const ExprNode& n, Scalar v, const char* what) {
  if (!std::isfinite(static_cast<long double>(v))) domain<Scalar>(n, std::string("non-finite result of ") + what);
  return v;
}

template <typename Scalar>
Scalar eval_node(const Expr& e, const EvalContext<Scalar>& ctx) {
  const ExprNode& n = e.node();
  return std::visit(
      [&](const auto& d) -> Scalar {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, NumberNode>) {
          return static_cast<Scalar>(d.value);
        } else if constexpr (std::is_same_v<T, SymbolNode>) {
          auto v = ctx.get(d.symbol);
          if (!v) {
            throw EvalError(EvalError::Kind::UnboundSymbol, n.position,
                            "unbound symbol '" + std::string(symbol_name(d.symbol)) + "'");
          }
          return *v;
        } else if constexpr (std::is_same_v<T, NegateNode>) {
          return -eval_node(d.operand, ctx);
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          const Scalar l = eval_node(d.lhs, ctx);
          const Scalar r = eval_node(d.rhs, ctx);
          switch (d.op) {
            case BinaryOp::Add: return checked(n, l + r, "+");
            case BinaryOp::Sub: return checked(n, l - r, "-");
            case BinaryOp::Mul: return checked(n, l * r, "*");
            case BinaryOp::Div:
              if (r == Scalar(0)) domain<Scalar>(n, "division by zero");
              return checked(n, l / r, "/");
            case BinaryOp::Pow:
              if (l < Scalar(0) && std::trunc(r) != r) domain<Scalar>(n, "negative base with non-integer exponent");
              if (l == Scalar(0) && r < Scalar(0)) domain<Scalar>(n, "zero base with negative exponent");
              return checked(n, std::pow(l, r), "^");
          }
          return Scalar(0);
        } else {
          const Scalar a = eval_node(d.arg, ctx);
          switch (d.func) {
            case Func::Sin: return std::sin(a);
            case Func::Cos: return std::cos(a);
            case Func::Exp: return checked(n, std::exp(a), "exp");
            case Func::Log:
              if (!(a > Scalar(0))) domain<Scalar>(n, "log of non-positive argument");
              return std::log(a);
            case Func::Sqrt:
              if (a < Scalar(0)) domain<Scalar>(n, "sqrt of negative argument");
              return std::sqrt(a);
            case Func::Abs: return std::abs(a);
          }
          return Scalar(0);
        }
      },
      n.data);
}

void print_to(const Expr& e, std::string& out) {
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, NumberNode>) {
          char buf[40];
          std::snprintf(buf, sizeof buf, "%.17g", std::abs(d.value));
          if (std::signbit(d.value)) {
            out += "(-";
            out += buf;
            out += ')';
          } else {
            out += buf;
          }
        } else if constexpr (std::is_same_v<T, SymbolNode>) {
          out += symbol_name(d.symbol);
        } else if constexpr (std::is_same_v<T, NegateNode>) {
          out += "(-";
          print_to(d.operand, out);
          out += ')';
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          static constexpr char ops[] = {'+', '-', '*', '/', '^'};
          out += '(';
          print_to(d.lhs, out);
          out += ops[static_cast<int>(d.op)];
          print_to(d.rhs, out);
          out += ')';
        } else {
          out += func_name(d.func);
          out += '(';
          print_to(d.arg, out);
          out += ')';
        }
      },
      e.node().data);
}

void collect_symbols(const Expr& e, std::set<Symbol>& out) {
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SymbolNode>) {
          out.insert(d.symbol);
        } else if constexpr (std::is_same_v<T, NegateNode>) {
          collect_symbols(d.operand, out);
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          collect_symbols(d.lhs, out);
          collect_symbols(d.rhs, out);
        } else if constexpr (std::is_same_v<T, CallNode>) {
          collect_symbols(d.arg, out);
        }
      },
      e.node().data);
}

bool is_value(const Expr& e, double v) {
  auto n = e.number_value();
  return n && *n == v;
}

// Builders with trivial folding, used by differentiate.
Expr add(const Expr& a, const Expr& b, std::size_t pos) {
  if (is_value(a, 0)) return b;
  if (is_value(b, 0)) return a;
  return Expr::binary(BinaryOp::Add, a, b, pos);
}
Expr sub(const Expr& a, const Expr& b, std::size_t pos) {
  if (is_value(b, 0)) return a;
  if (is_value(a, 0)) return Expr::negate(b, pos);
  return Expr::binary(BinaryOp::Sub, a, b, pos);
}
Expr mul(const Expr& a, const Expr& b, std::size_t pos) {
  if (is_value(a, 0) || is_value(b, 0)) return Expr::number(0, pos);
  if (is_value(a, 1)) return b;
  if (is_value(b, 1)) return a;
  return Expr::binary(BinaryOp::Mul, a, b, pos);
}
Expr div(const Expr& a, const Expr& b, std::size_t pos) {
  if (is_value(a, 0)) return Expr::number(0, pos);
  if (is_value(b, 1)) return a;
  return Expr::binary(BinaryOp::Div, a, b, pos);
}
Expr neg(const Expr& a, std::size_t pos) {
  if (is_value(a, 0)) return a;
  return Expr::negate(a, pos);
}

}  // namespace

std::string_view symbol_name(Symbol s) {
  switch (s) {
    case Symbol::X: return "x";
    case Symbol::Eps: return "eps";
    case Symbol::Y0: return "y0";
    case Symbol::Y1: return "y1";
    case Symbol::Y2: return "y2";
    case Symbol::Y3: return "y3";
    case Symbol::Y4: return "y4";
  }
  return "?";
}

Expr::Expr() : Expr(number(0)) {}

Expr Expr::number(double v, std::size_t position) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{NumberNode{v}, position}));
}
Expr Expr::symbol(Symbol s, std::size_t position) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{SymbolNode{s}, position}));
}
Expr Expr::negate(Expr e, std::size_t position) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{NegateNode{std::move(e)}, position}));
}
Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs, std::size_t position) {
  return Expr(std::make_shared<const ExprNode>(
      ExprNode{BinaryNode{op, std::move(lhs), std::move(rhs)}, position}));
}
Expr Expr::call(Func f, Expr arg, std::size_t position) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{CallNode{f, std::move(arg)}, position}));
}

bool Expr::is_number() const { return std::holds_alternative<NumberNode>(node_->data); }

std::optional<double> Expr::number_value() const {
  if (const auto* n = std::get_if<NumberNode>(&node_->data)) return n->value;
  return std::nullopt;
}

Expr parse(std::string_view source) { return Parser(source).parse_all(); }

std::string print(const Expr& e) {
  std::string out;
  print_to(e, out);
  return out;
}

template <typename Scalar>
Scalar evaluate(const Expr& e, const EvalContext<Scalar>& ctx) {
  return eval_node(e, ctx);
}

template double evaluate<double>(const Expr&, const EvalContext<double>&);
template long double evaluate<long double>(const Expr&, const EvalContext<long double>&);

std::set<Symbol> free_symbols(const Expr& e) {
  std::set<Symbol> out;
  collect_symbols(e, out);
  return out;
}

bool depends_on(const Expr& e, Symbol s) { return free_symbols(e).count(s) > 0; }

Expr differentiate(const Expr& e, Symbol s) {
  const ExprNode& n = e.node();
  const std::size_t p = n.position;
  return std::visit(
      [&](const auto& d) -> Expr {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, NumberNode>) {
          return Expr::number(0, p);
        } else if constexpr (std::is_same_v<T, SymbolNode>) {
          return Expr::number(d.symbol == s ? 1.0 : 0.0, p);
        } else if constexpr (std::is_same_v<T, NegateNode>) {
          return neg(differentiate(d.operand, s), p);
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          const Expr& u = d.lhs;
          const Expr& v = d.rhs;
          const Expr du = differentiate(u, s);
          const Expr dv = differentiate(v, s);
          switch (d.op) {
            case BinaryOp::Add: return add(du, dv, p);
            case BinaryOp::Sub: return sub(du, dv, p);
            case BinaryOp::Mul: return add(mul(du, v, p), mul(u, dv, p), p);
            case BinaryOp::Div:
              // (u'v - uv') / v^2
              return div(sub(mul(du, v, p), mul(u, dv, p), p),
                         mul(v, v, p), p);
            case BinaryOp::Pow: {
              if (!depends_on(v, s)) {
                // c u^(c-1) u'
                if (is_value(du, 0)) return Expr::number(0, p);
                const Expr cm1 = v.is_number() ? Expr::number(*v.number_value() - 1.0, p)
                                               : sub(v, Expr::number(1.0, p), p);
                return mul(mul(v, Expr::binary(BinaryOp::Pow, u, cm1, p), p), du, p);
              }
              // u^v (v' log u + v u'/u)
              const Expr log_u = Expr::call(Func::Log, u, p);
              return mul(e, add(mul(dv, log_u, p), div(mul(v, du, p), u, p), p), p);
            }
          }
          return Expr::number(0, p);
        } else {
          const Expr& u = d.arg;
          const Expr du = differentiate(u, s);
          if (is_value(du, 0)) return Expr::number(0, p);
          switch (d.func) {
            case Func::Sin: return mul(Expr::call(Func::Cos, u, p), du, p);
            case Func::Cos: return mul(neg(Expr::call(Func::Sin, u, p), p), du, p);
            case Func::Exp: return mul(e, du, p);
            case Func::Log: return div(du, u, p);
            case Func::Sqrt: return div(du, mul(Expr::number(2.0, p), e, p), p);
            case Func::Abs: return mul(div(u, e, p), du, p);
          }
          return Expr::number(0, p);
        }
      },
      n.data);
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::negate(a); }

}  // namespace dqm
