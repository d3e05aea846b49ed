#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace anharmonic {

enum class ExprKind {
  constant,
  variable,
  sum,
  difference,
  product,
  quotient,
  power,
  exp,
  ln,
  sin,
  cos,
  sqrt,
  abs,
};

struct ExprNode;

/// Immutable expression tree in the single variable t.
///
/// Copies share structure; nodes are never mutated after construction, so an
/// Expr may be read from any number of threads. Power nodes always carry a
/// constant exponent.
class Expr {
 public:
  /// The constant 0.
  Expr();

  static Expr constant(double value);
  static Expr variable();
  static Expr unary(ExprKind kind, Expr argument);
  static Expr binary(ExprKind kind, Expr lhs, Expr rhs);
  static Expr power(Expr base, double exponent);

  ExprKind kind() const;
  /// Constant value for constant nodes, exponent for power nodes, 0 otherwise.
  double value() const;
  std::span<const Expr> children() const;

  bool is_constant() const { return kind() == ExprKind::constant; }
  bool is_constant(double v) const { return is_constant() && value() == v; }

  double operator()(double t) const;

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ExprNode> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, double exponent);
Expr exp(const Expr& a);
Expr ln(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr sqrt(const Expr& a);
Expr abs(const Expr& a);

/// Parses the coefficient grammar:
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | power
///   power   := primary ('^' unary)?          right-associative
///   primary := number | 't' | fn '(' expr ')' | '(' expr ')'
///   fn      := exp | ln | sin | cos | sqrt | abs
///
/// The right operand of '^' must fold to a constant. Throws ParseError.
Expr parse(std::string_view text);

/// Throws DomainError naming the offending subexpression and t.
double eval(const Expr& e, double t);

/// Exact structural derivative d/dt. Only constant folding is applied.
Expr differentiate(const Expr& e);

/// Fully parenthesized text that parse() maps back to the same tree.
std::string render(const Expr& e);

/// Number of nodes (shared subtrees counted once per reference).
std::size_t node_count(const Expr& e);

}  // namespace anharmonic
