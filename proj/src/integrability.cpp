#include "anharmonic/integrability.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "anharmonic/error.hpp"

namespace anharmonic {

namespace {

Expr k(double v) { return Expr::constant(v); }

void require_positive(double f3, double t) {
  if (!(f3 > 0.0)) {
    throw DomainError("f3 must be positive; f3(" + format_real(t) + ") = " + format_real(f3));
  }
}

double bisect_sign_change(const RealFn& f, double lo, double hi, double f_lo) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double condition_rhs(const Coefficient& f1, const Coefficient& f3, double n, double t) {
  require_admissible_exponent(n);
  const double f3v = f3(t);
  require_positive(f3v, t);
  const double u = f3.derivative(t, 1) / f3v;
  const double f3pp_over_f3 = f3.derivative(t, 2) / f3v;
  const double f1v = f1(t);
  const double f1p = f1.derivative(t, 1);
  const double s = n + 3.0;
  return f3pp_over_f3 / s - (n + 4.0) / (s * s) * u * u + (n - 1.0) / (s * s) * u * f1v +
         2.0 / s * f1p + 2.0 * (n + 1.0) / (s * s) * f1v * f1v;
}

double condition_residual(const CoefficientSet& cs, double t) {
  return cs.f2()(t) - condition_rhs(cs.f1(), cs.f3(), cs.n(), t);
}

double max_condition_residual(const CoefficientSet& cs, int count) {
  double worst = 0.0;
  for (double t : linspace(cs.domain().lo, cs.domain().hi, count)) {
    worst = std::max(worst, std::abs(condition_residual(cs, t)));
  }
  return worst;
}

Coefficient derive_f2_case1(const Expr& f1, const Expr& f3, double n) {
  require_admissible_exponent(n);
  const double s = n + 3.0;
  const Expr d3 = differentiate(f3);
  const Expr u = d3 / f3;
  return Coefficient(k(1.0 / s) * (differentiate(d3) / f3) - k((n + 4.0) / (s * s)) * pow(u, 2.0) +
                     k((n - 1.0) / (s * s)) * u * f1 + k(2.0 / s) * differentiate(f1) +
                     k(2.0 * (n + 1.0) / (s * s)) * pow(f1, 2.0));
}

RiccatiCoefficients riccati_coeffs_f1(const Coefficient& f3, const Coefficient& f2, double n) {
  require_admissible_exponent(n);
  const double s = 3.0 + n;
  RiccatiCoefficients r;
  r.a = [f3, f2, n, s](double t) {
    const double f3v = f3(t);
    require_positive(f3v, t);
    const double u = f3.derivative(t, 1) / f3v;
    return s / 2.0 * f2(t) - 0.5 * f3.derivative(t, 2) / f3v + (4.0 + n) / (2.0 * s) * u * u;
  };
  r.b = [f3, n, s](double t) {
    const double f3v = f3(t);
    require_positive(f3v, t);
    return (1.0 - n) / (2.0 * s) * f3.derivative(t, 1) / f3v;
  };
  const double c = -(1.0 + n) / s;
  r.c = [c](double) { return c; };
  return r;
}

Coefficient derive_f2_case2(const Expr& f3, double n) {
  require_admissible_exponent(n);
  const double s = 3.0 + n;
  const Expr d3 = differentiate(f3);
  const Expr u = d3 / f3;
  return Coefficient(k(1.0 / s) * (differentiate(d3) / f3) - k((4.0 + n) / (s * s)) * pow(u, 2.0));
}

PoleReport scan_poles(const RealFn& denominator, Interval domain, double t_ref, double guard,
                      int points) {
  if (points < 2) throw UsageError("pole scan needs at least 2 points");
  // Every nested integral starts at t_ref, so the region between t_ref and
  // the domain matters too.
  const Interval span{std::min(domain.lo, t_ref), std::max(domain.hi, t_ref)};
  PoleReport report;
  if (span.hi > span.lo) {
    const auto grid = linspace(span.lo, span.hi, points);
    double prev_t = grid[0];
    double prev_v = denominator(prev_t);
    if (prev_v == 0.0) report.poles.push_back(prev_t);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double t = grid[i];
      const double v = denominator(t);
      if (v == 0.0) {
        report.poles.push_back(t);
      } else if (prev_v != 0.0 && (v > 0.0) != (prev_v > 0.0)) {
        report.poles.push_back(bisect_sign_change(denominator, prev_t, t, prev_v));
      }
      prev_t = t;
      prev_v = v;
    }
  }

  double lo = span.lo;
  double hi = span.hi;
  for (double p : report.poles) {
    if (p == t_ref) {
      report.usable = {t_ref, t_ref};
      return report;
    }
    if (p < t_ref) lo = std::max(lo, p + guard);
    if (p > t_ref) hi = std::min(hi, p - guard);
  }
  report.usable = {std::max(lo, domain.lo), std::min(hi, domain.hi)};
  return report;
}

DerivedF1 derive_f1_case2(const Expr& f3, double n, double C1, const DerivationOptions& opts) {
  require_admissible_exponent(n);
  if (C1 == 0.0) throw UsageError("C1 must be nonzero (the denominator vanishes at t_ref)");
  const double s = 3.0 + n;
  const double power = (1.0 - n) / (2.0 * s);
  const double m = (1.0 + n) / s;

  const Expr g = pow(f3, power);
  const Expr dg = differentiate(g);
  const AntiderivativePtr G = antiderivative(g, opts.t_ref, opts.tol);

  RealFn denominator = [G, C1, m](double t) { return C1 + m * (*G)(t); };
  auto checked_denominator = [denominator](double t) {
    const double d = denominator(t);
    if (d == 0.0) throw DomainError("f1 has a pole at t=" + format_real(t, 17));
    return d;
  };
  RealFn value = [g, checked_denominator](double t) { return g(t) / checked_denominator(t); };
  // Quotient rule on g / D with D' = m g.
  RealFn slope = [g, dg, m, checked_denominator](double t) {
    const double d = checked_denominator(t);
    const double gv = g(t);
    return dg(t) / d - m * gv * gv / (d * d);
  };

  DerivedF1 out{Coefficient::derived(value, {slope}, "f1 (Bernoulli, case 2)"), denominator, {}};
  out.poles = scan_poles(denominator, opts.domain, opts.t_ref, opts.guard, opts.scan_points);
  if (out.poles.usable.empty()) {
    throw PoleError("derived f1 has no pole-free interval in the domain");
  }
  return out;
}

RiccatiCoefficients riccati_coeffs_u(const Coefficient& f1, const Coefficient& f2, double n) {
  require_admissible_exponent(n);
  const double s = 3.0 + n;
  RiccatiCoefficients r;
  r.a = [f1, f2, n, s](double t) {
    const double f1v = f1(t);
    return s * f2(t) - 2.0 * (1.0 + n) / s * f1v * f1v - 2.0 * f1.derivative(t, 1);
  };
  r.b = [f1, n, s](double t) { return (1.0 - n) / s * f1(t); };
  const double c = 1.0 / s;
  r.c = [c](double) { return c; };
  return r;
}

Coefficient derive_f2_case3(const Expr& f1, double n) {
  require_admissible_exponent(n);
  const double s = 3.0 + n;
  return Coefficient(k(2.0 * (1.0 + n) / (s * s)) * pow(f1, 2.0) + k(2.0 / s) * differentiate(f1));
}

DerivedF3 derive_f3_case3(const Expr& f1, double n, double C2, double f03,
                          const DerivationOptions& opts) {
  require_admissible_exponent(n);
  if (!(f03 > 0.0)) throw UsageError("f03 must be positive so that f3 > 0");
  const double s = 3.0 + n;
  const double rate = (1.0 - n) / s;
  const double c1 = 1.0 / s;

  const AntiderivativePtr F1 = antiderivative(f1, opts.t_ref, opts.tol);
  RealFn E = [F1, rate](double t) { return std::exp(rate * (*F1)(t)); };
  const AntiderivativePtr W = antiderivative(E, opts.t_ref, opts.tol);

  RealFn denominator = [W, C2, c1](double t) { return C2 - c1 * (*W)(t); };
  auto checked_denominator = [denominator](double t) {
    const double d = denominator(t);
    if (d == 0.0) throw DomainError("u has a pole at t=" + format_real(t, 17));
    return d;
  };
  RealFn u = [E, checked_denominator](double t) { return E(t) / checked_denominator(t); };
  // Quotient rule on E / D with E' = rate f1 E and D' = -c1 E.
  RealFn du = [E, f1, rate, c1, checked_denominator](double t) {
    const double d = checked_denominator(t);
    const double e = E(t);
    return (rate * f1(t) * e * d + c1 * e * e) / (d * d);
  };
  const AntiderivativePtr U = antiderivative(u, opts.t_ref, opts.tol);

  RealFn f3 = [U, f03](double t) { return f03 * std::exp((*U)(t)); };
  RealFn df3 = [f3, u](double t) { return u(t) * f3(t); };
  RealFn d2f3 = [f3, u, du](double t) {
    const double uv = u(t);
    return (du(t) + uv * uv) * f3(t);
  };

  DerivedF3 out{Coefficient::derived(f3, {df3, d2f3}, "f3 (Bernoulli, case 3)"),
                Coefficient::derived(u, {du}, "u = f3'/f3 (case 3)"), denominator, {}};
  out.poles = scan_poles(denominator, opts.domain, opts.t_ref, opts.guard, opts.scan_points);
  if (out.poles.usable.empty()) {
    throw PoleError("derived f3 has no pole-free interval in the domain");
  }
  return out;
}

}  // namespace anharmonic
