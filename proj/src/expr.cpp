#include "anharmonic/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <unordered_set>
#include <vector>

#include "anharmonic/error.hpp"
#include "anharmonic/numeric.hpp"

namespace anharmonic {

struct ExprNode {
  ExprKind kind = ExprKind::constant;
  double value = 0.0;
  std::vector<Expr> children;
};

namespace {

bool is_unary(ExprKind k) {
  switch (k) {
    case ExprKind::exp:
    case ExprKind::ln:
    case ExprKind::sin:
    case ExprKind::cos:
    case ExprKind::sqrt:
    case ExprKind::abs:
      return true;
    default:
      return false;
  }
}

bool is_binary(ExprKind k) {
  return k == ExprKind::sum || k == ExprKind::difference || k == ExprKind::product ||
         k == ExprKind::quotient;
}

const char* function_name(ExprKind k) {
  switch (k) {
    case ExprKind::exp:
      return "exp";
    case ExprKind::ln:
      return "ln";
    case ExprKind::sin:
      return "sin";
    case ExprKind::cos:
      return "cos";
    case ExprKind::sqrt:
      return "sqrt";
    case ExprKind::abs:
      return "abs";
    default:
      return "?";
  }
}

char operator_symbol(ExprKind k) {
  switch (k) {
    case ExprKind::sum:
      return '+';
    case ExprKind::difference:
      return '-';
    case ExprKind::product:
      return '*';
    case ExprKind::quotient:
      return '/';
    default:
      return '?';
  }
}

[[noreturn]] void domain_failure(const std::string& what, const Expr& e, double t) {
  throw DomainError(what + " in '" + render(e) + "' at t=" + format_real(t, 17));
}

double apply_unary(ExprKind k, double a, const Expr& e, double t) {
  switch (k) {
    case ExprKind::exp:
      return std::exp(a);
    case ExprKind::ln:
      if (!(a > 0.0)) domain_failure("ln argument " + format_real(a) + " <= 0", e, t);
      return std::log(a);
    case ExprKind::sin:
      return std::sin(a);
    case ExprKind::cos:
      return std::cos(a);
    case ExprKind::sqrt:
      if (a < 0.0) domain_failure("sqrt argument " + format_real(a) + " < 0", e, t);
      return std::sqrt(a);
    case ExprKind::abs:
      return std::abs(a);
    default:
      return 0.0;
  }
}

double apply_binary(ExprKind k, double a, double b, const Expr& e, double t) {
  switch (k) {
    case ExprKind::sum:
      return a + b;
    case ExprKind::difference:
      return a - b;
    case ExprKind::product:
      return a * b;
    case ExprKind::quotient:
      if (b == 0.0) domain_failure("division by zero", e, t);
      return a / b;
    default:
      return 0.0;
  }
}

double eval_node(const Expr& e, double t) {
  const auto kids = e.children();
  double result = 0.0;
  switch (e.kind()) {
    case ExprKind::constant:
      return e.value();
    case ExprKind::variable:
      return t;
    case ExprKind::power: {
      const double base = eval_node(kids[0], t);
      try {
        result = real_pow(base, e.value());
      } catch (const DomainError& err) {
        domain_failure(err.what(), e, t);
      }
      break;
    }
    default:
      if (is_unary(e.kind())) {
        result = apply_unary(e.kind(), eval_node(kids[0], t), e, t);
      } else {
        result = apply_binary(e.kind(), eval_node(kids[0], t), eval_node(kids[1], t), e, t);
      }
  }
  if (!std::isfinite(result)) domain_failure("non-finite value", e, t);
  return result;
}

// Folds only when the result is finite and free of domain errors; anything
// else is left for eval() to report with a position.
bool try_fold(const Expr& e, double& out) {
  try {
    out = eval_node(e, 0.0);
    return true;
  } catch (const DomainError&) {
    return false;
  }
}

bool all_constant(std::span<const Expr> kids) {
  for (const auto& k : kids) {
    if (!k.is_constant()) return false;
  }
  return true;
}

// --- parser -----------------------------------------------------------------

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) {
      throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    }
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) {
        throw ParseError(std::string("expected '") + c + "' but reached end of input", pos_);
      }
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + parse_term();
      } else if (accept('-')) {
        lhs = lhs - parse_term();
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * parse_unary();
      } else if (accept('/')) {
        lhs = lhs / parse_unary();
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) return -parse_unary();
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    skip_ws();
    const std::size_t at = pos_;
    if (accept('^')) {
      Expr exponent = parse_unary();
      if (!exponent.is_constant()) {
        throw ParseError("exponent must be a constant expression", at + 1);
      }
      return pow(base, exponent.value());
    }
    return base;
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    if (accept('(')) {
      Expr inner = parse_expr();
      expect(')');
      return inner;
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    // from_chars would also accept "inf"/"nan"; restrict to the numeric grammar.
    std::size_t end = pos_;
    while (end < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[end])) ||
                                  text_[end] == '.')) {
      ++end;
    }
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t k = end + 1;
      if (k < text_.size() && (text_[k] == '+' || text_[k] == '-')) ++k;
      if (k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k]))) {
        while (k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k]))) ++k;
        end = k;
      }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + end, value);
    if (ec != std::errc() || ptr != text_.data() + end) {
      throw ParseError("malformed number '" + std::string(text_.substr(start, end - start)) + "'",
                       start);
    }
    pos_ = end;
    return Expr::constant(value);
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "t") return Expr::variable();

    static constexpr std::pair<std::string_view, ExprKind> functions[] = {
        {"exp", ExprKind::exp},   {"ln", ExprKind::ln},     {"sin", ExprKind::sin},
        {"cos", ExprKind::cos},   {"sqrt", ExprKind::sqrt}, {"abs", ExprKind::abs},
    };
    for (const auto& [fname, kind] : functions) {
      if (name == fname) {
        expect('(');
        Expr arg = parse_expr();
        expect(')');
        return Expr::unary(kind, arg);
      }
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void render_into(const Expr& e, std::string& out) {
  const auto kids = e.children();
  switch (e.kind()) {
    case ExprKind::constant: {
      const std::string s = format_real(e.value(), 17);
      if (e.value() < 0.0) {
        out += '(';
        out += s;
        out += ')';
      } else {
        out += s;
      }
      return;
    }
    case ExprKind::variable:
      out += 't';
      return;
    case ExprKind::power:
      out += '(';
      render_into(kids[0], out);
      out += ")^(";
      out += format_real(e.value(), 17);
      out += ')';
      return;
    default:
      break;
  }
  if (is_unary(e.kind())) {
    out += function_name(e.kind());
    out += '(';
    render_into(kids[0], out);
    out += ')';
    return;
  }
  out += '(';
  render_into(kids[0], out);
  out += ' ';
  out += operator_symbol(e.kind());
  out += ' ';
  render_into(kids[1], out);
  out += ')';
}

void count_into(const Expr& e, std::size_t& n) {
  ++n;
  for (const auto& k : e.children()) count_into(k, n);
}

}  // namespace

// --- construction -----------------------------------------------------------

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double value) {
  auto node = std::make_shared<ExprNode>();
  node->kind = ExprKind::constant;
  node->value = value;
  return Expr(std::move(node));
}

Expr Expr::variable() {
  auto node = std::make_shared<ExprNode>();
  node->kind = ExprKind::variable;
  return Expr(std::move(node));
}

Expr Expr::unary(ExprKind kind, Expr argument) {
  if (!is_unary(kind)) throw UsageError("Expr::unary called with a non-unary kind");
  auto node = std::make_shared<ExprNode>();
  node->kind = kind;
  node->children.push_back(std::move(argument));
  Expr e(std::move(node));
  double folded = 0.0;
  if (all_constant(e.children()) && try_fold(e, folded)) return constant(folded);
  return e;
}

Expr Expr::binary(ExprKind kind, Expr lhs, Expr rhs) {
  if (!is_binary(kind)) throw UsageError("Expr::binary called with a non-binary kind");
  // Identity and annihilator constants fold away so derivative trees stay small.
  switch (kind) {
    case ExprKind::sum:
      if (lhs.is_constant(0.0)) return rhs;
      if (rhs.is_constant(0.0)) return lhs;
      break;
    case ExprKind::difference:
      if (rhs.is_constant(0.0)) return lhs;
      break;
    case ExprKind::product:
      if (lhs.is_constant(0.0) || rhs.is_constant(0.0)) return constant(0.0);
      if (lhs.is_constant(1.0)) return rhs;
      if (rhs.is_constant(1.0)) return lhs;
      break;
    case ExprKind::quotient:
      if (rhs.is_constant(1.0)) return lhs;
      break;
    default:
      break;
  }
  auto node = std::make_shared<ExprNode>();
  node->kind = kind;
  node->children.push_back(std::move(lhs));
  node->children.push_back(std::move(rhs));
  Expr e(std::move(node));
  double folded = 0.0;
  if (all_constant(e.children()) && try_fold(e, folded)) return constant(folded);
  return e;
}

Expr Expr::power(Expr base, double exponent) {
  if (!std::isfinite(exponent)) throw UsageError("power exponent must be finite");
  if (exponent == 0.0) return constant(1.0);
  if (exponent == 1.0) return base;
  auto node = std::make_shared<ExprNode>();
  node->kind = ExprKind::power;
  node->value = exponent;
  node->children.push_back(std::move(base));
  Expr e(std::move(node));
  double folded = 0.0;
  if (all_constant(e.children()) && try_fold(e, folded)) return constant(folded);
  return e;
}

ExprKind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
std::span<const Expr> Expr::children() const { return node_->children; }
double Expr::operator()(double t) const { return eval(*this, t); }

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(ExprKind::sum, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(ExprKind::difference, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(ExprKind::product, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(ExprKind::quotient, a, b); }
Expr operator-(const Expr& a) { return Expr::constant(-1.0) * a; }
Expr pow(const Expr& base, double exponent) { return Expr::power(base, exponent); }
Expr exp(const Expr& a) { return Expr::unary(ExprKind::exp, a); }
Expr ln(const Expr& a) { return Expr::unary(ExprKind::ln, a); }
Expr sin(const Expr& a) { return Expr::unary(ExprKind::sin, a); }
Expr cos(const Expr& a) { return Expr::unary(ExprKind::cos, a); }
Expr sqrt(const Expr& a) { return Expr::unary(ExprKind::sqrt, a); }
Expr abs(const Expr& a) { return Expr::unary(ExprKind::abs, a); }

// --- public operations ------------------------------------------------------

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

double eval(const Expr& e, double t) { return eval_node(e, t); }

Expr differentiate(const Expr& e) {
  const auto kids = e.children();
  switch (e.kind()) {
    case ExprKind::constant:
      return Expr::constant(0.0);
    case ExprKind::variable:
      return Expr::constant(1.0);
    case ExprKind::sum:
      return differentiate(kids[0]) + differentiate(kids[1]);
    case ExprKind::difference:
      return differentiate(kids[0]) - differentiate(kids[1]);
    case ExprKind::product:
      return differentiate(kids[0]) * kids[1] + kids[0] * differentiate(kids[1]);
    case ExprKind::quotient: {
      const Expr& u = kids[0];
      const Expr& v = kids[1];
      return (differentiate(u) * v - u * differentiate(v)) / pow(v, 2.0);
    }
    case ExprKind::power: {
      const double p = e.value();
      return Expr::constant(p) * pow(kids[0], p - 1.0) * differentiate(kids[0]);
    }
    case ExprKind::exp:
      return e * differentiate(kids[0]);
    case ExprKind::ln:
      return differentiate(kids[0]) / kids[0];
    case ExprKind::sin:
      return cos(kids[0]) * differentiate(kids[0]);
    case ExprKind::cos:
      return -(sin(kids[0]) * differentiate(kids[0]));
    case ExprKind::sqrt:
      return differentiate(kids[0]) / (Expr::constant(2.0) * e);
    case ExprKind::abs:
      // sign(u) * u', undefined where u = 0 (division by zero at eval time).
      return kids[0] * differentiate(kids[0]) / e;
  }
  return Expr::constant(0.0);
}

std::string render(const Expr& e) {
  std::string out;
  render_into(e, out);
  return out;
}

std::size_t node_count(const Expr& e) {
  std::size_t n = 0;
  count_into(e, n);
  return n;
}

}  // namespace anharmonic
