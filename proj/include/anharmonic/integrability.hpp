#pragma once

#include <vector>

#include "anharmonic/coefficient.hpp"
#include "anharmonic/expr.hpp"
#include "anharmonic/quadrature.hpp"

namespace anharmonic {

/// Right side of the integrability condition: the f2 that makes
/// x'' + f1 x' + f2 x + f3 x^n = 0 point-equivalent to X'' + X^n = 0.
///
///   f2 = f3''/((n+3) f3) - (n+4)/(n+3)^2 (f3'/f3)^2 + (n-1)/(n+3)^2 (f3'/f3) f1
///        + 2/(n+3) f1' + 2(n+1)/(n+3)^2 f1^2
double condition_rhs(const Coefficient& f1, const Coefficient& f3, double n, double t);

/// f2(t) - condition_rhs(t). Zero (to tolerance) iff the set is integrable.
double condition_residual(const CoefficientSet& cs, double t);

/// max |condition_residual| over `count` evenly spaced points of the domain.
double max_condition_residual(const CoefficientSet& cs, int count);

/// y' = a(t) + b(t) y + c(t) y^2.
struct RiccatiCoefficients {
  RealFn a;
  RealFn b;
  RealFn c;
};

/// Where a Bernoulli denominator changes sign inside the requested domain,
/// and the largest pole-free interval around the base point, pulled back by
/// the guard distance from each pole.
struct PoleReport {
  std::vector<double> poles;
  Interval usable;
  bool truncated() const { return !poles.empty(); }
};

struct DerivationOptions {
  double t_ref = 0.0;
  Interval domain{0.0, 1.0};
  double tol = kDefaultQuadratureTol;
  double guard = 1e-3;
  int scan_points = 1000;
};

// Case 1: f2 from (f1, f3). Built symbolically, so the result is Expr-backed.
Coefficient derive_f2_case1(const Expr& f1, const Expr& f3, double n);

// Case 2 (Riccati equation in f1).
RiccatiCoefficients riccati_coeffs_f1(const Coefficient& f3, const Coefficient& f2, double n);
Coefficient derive_f2_case2(const Expr& f3, double n);

struct DerivedF1 {
  Coefficient f1;
  /// C1 + (1+n)/(3+n) * integral of f3^((1-n)/(2(3+n))) from t_ref.
  RealFn denominator;
  PoleReport poles;
};

/// Bernoulli solution f1 = g / (C1 + (1+n)/(3+n) G), g = f3^((1-n)/(2(3+n))),
/// G the antiderivative of g from t_ref. Throws PoleError if no usable
/// interval remains.
DerivedF1 derive_f1_case2(const Expr& f3, double n, double C1, const DerivationOptions& opts);

// Case 3 (Riccati equation in u = f3'/f3).
RiccatiCoefficients riccati_coeffs_u(const Coefficient& f1, const Coefficient& f2, double n);
Coefficient derive_f2_case3(const Expr& f1, double n);

struct DerivedF3 {
  Coefficient f3;
  /// u = E / (C2 - W/(3+n)), E = exp((1-n)/(3+n) F1), W the antiderivative of E.
  Coefficient u;
  RealFn denominator;
  PoleReport poles;
};

/// f3 = f03 exp(integral of u from t_ref). Requires f03 > 0.
DerivedF3 derive_f3_case3(const Expr& f1, double n, double C2, double f03,
                          const DerivationOptions& opts);

/// Scans `denominator` on `points` samples of `domain`, bisects each sign
/// change, and returns the pole-free component that contains the base point
/// (clamped into the domain), shrunk by `guard` on any side that ends at a
/// pole.
PoleReport scan_poles(const RealFn& denominator, Interval domain, double t_ref, double guard,
                      int points);

}  // namespace anharmonic
