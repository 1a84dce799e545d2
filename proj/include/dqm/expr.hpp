#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>

namespace dqm {

/// Free symbols an expression may reference. Yk is the k-th derivative of
/// the unknown at the current node.
enum class Symbol { X, Eps, Y0, Y1, Y2, Y3, Y4 };
enum class Func { Sin, Cos, Exp, Log, Sqrt, Abs };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

constexpr Symbol derivative_symbol(int k) { return static_cast<Symbol>(static_cast<int>(Symbol::Y0) + k); }
std::string_view symbol_name(Symbol s);

struct ExprNode;

/// Immutable scalar expression tree. Copies share structure.
class Expr {
 public:
  Expr();  // the literal 0
  static Expr number(double v, std::size_t position = 0);
  static Expr symbol(Symbol s, std::size_t position = 0);
  static Expr negate(Expr e, std::size_t position = 0);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs, std::size_t position = 0);
  static Expr call(Func f, Expr arg, std::size_t position = 0);

  const ExprNode& node() const { return *node_; }
  bool is_number() const;
  std::optional<double> number_value() const;

 private:
  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ExprNode> node_;
};

struct NumberNode {
  double value;
};
struct SymbolNode {
  Symbol symbol;
};
struct NegateNode {
  Expr operand;
};
struct BinaryNode {
  BinaryOp op;
  Expr lhs, rhs;
};
struct CallNode {
  Func func;
  Expr arg;
};

struct ExprNode {
  std::variant<NumberNode, SymbolNode, NegateNode, BinaryNode, CallNode> data;
  // Offset in the parsed source; generated nodes inherit their origin's.
  std::size_t position = 0;
};

/// Bindings for evaluation. Unset symbols are unbound.
template <typename Scalar>
struct EvalContext {
  std::optional<Scalar> x;
  std::optional<Scalar> eps;
  std::array<std::optional<Scalar>, 5> y{};

  std::optional<Scalar> get(Symbol s) const {
    switch (s) {
      case Symbol::X: return x;
      case Symbol::Eps: return eps;
      default: return y[static_cast<std::size_t>(static_cast<int>(s) - static_cast<int>(Symbol::Y0))];
    }
  }
  void set(Symbol s, Scalar v) {
    switch (s) {
      case Symbol::X: x = v; break;
      case Symbol::Eps: eps = v; break;
      default: y[static_cast<std::size_t>(static_cast<int>(s) - static_cast<int>(Symbol::Y0))] = v;
    }
  }
};

/// Recursive-descent parser.
///
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | atom ('^' factor)?
///   atom   := number | symbol | func '(' expr ')' | '(' expr ')'
///
/// '^' is right-associative and binds tighter than unary minus, so "-x^2"
/// is -(x^2). Symbols: x, eps, y0..y4, pi. Functions: sin, cos, exp, log,
/// sqrt, abs.
Expr parse(std::string_view source);

/// Fully parenthesized text that parses back to an equivalent tree.
std::string print(const Expr& e);

template <typename Scalar>
Scalar evaluate(const Expr& e, const EvalContext<Scalar>& ctx);

/// Exact partial derivative. Trivial constant folding only.
Expr differentiate(const Expr& e, Symbol s);

std::set<Symbol> free_symbols(const Expr& e);
bool depends_on(const Expr& e, Symbol s);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

}  // namespace dqm
