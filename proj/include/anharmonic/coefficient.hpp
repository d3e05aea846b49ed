#pragma once

#include <optional>
#include <string>
#include <vector>

#include "anharmonic/expr.hpp"
#include "anharmonic/numeric.hpp"

namespace anharmonic {

/// A coefficient function of t together with whatever derivatives are known
/// exactly.
///
/// Expr-backed coefficients carry symbolic first and second derivatives.
/// Derived coefficients (built from antiderivatives) carry the derivatives
/// their construction gives for free; any order beyond what is supplied falls
/// back to five-point central differences with h = max(1e-5, 1e-5 |t|).
class Coefficient {
 public:
  Coefficient();
  Coefficient(double constant);  // NOLINT(google-explicit-constructor)
  Coefficient(Expr e);           // NOLINT(google-explicit-constructor)

  /// derivatives[k] is the (k+1)-th derivative.
  static Coefficient derived(RealFn value, std::vector<RealFn> derivatives, std::string label);

  double operator()(double t) const { return jets_[0](t); }
  /// order in {0, 1, 2}.
  double derivative(double t, int order = 1) const;
  /// Number of leading derivative orders known without differencing.
  int exact_orders() const { return static_cast<int>(jets_.size()) - 1; }

  const std::optional<Expr>& expr() const { return expr_; }
  std::string describe() const;
  RealFn as_function() const { return jets_[0]; }

 private:
  std::vector<RealFn> jets_;
  std::optional<Expr> expr_;
  std::string label_;
};

/// Step used when a derivative of a derived coefficient is differenced.
double derived_fd_step(double t);

/// The coefficient triple (f1, f2, f3) of x'' + f1 x' + f2 x + f3 x^n = 0,
/// with its exponent and working interval.
///
/// Construction rejects n in {-3, -1, 0, 1} (UsageError) and requires all
/// three coefficients to be evaluable with f3 > 0 across the domain
/// (DomainError), checked on a 257-point grid.
class CoefficientSet {
 public:
  CoefficientSet(Coefficient f1, Coefficient f2, Coefficient f3, double n, Interval domain);

  const Coefficient& f1() const { return f1_; }
  const Coefficient& f2() const { return f2_; }
  const Coefficient& f3() const { return f3_; }
  double n() const { return n_; }
  const Interval& domain() const { return domain_; }

  /// Same coefficients, different exponent (validated).
  CoefficientSet with_exponent(double n) const;
  /// Same coefficients, different interval (validated).
  CoefficientSet with_domain(Interval domain) const;

 private:
  Coefficient f1_;
  Coefficient f2_;
  Coefficient f3_;
  double n_;
  Interval domain_;
};

}  // namespace anharmonic
