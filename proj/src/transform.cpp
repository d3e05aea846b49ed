#include "anharmonic/transform.hpp"

#include <cmath>
#include <limits>

#include "anharmonic/error.hpp"

namespace anharmonic {

void validate(const TransformParams& p) {
  require_admissible_exponent(p.n);
  if (!(p.C > 0.0) || !std::isfinite(p.C)) {
    throw UsageError("transform constant C must be positive and finite");
  }
  if (!std::isfinite(p.t_ref)) throw UsageError("t_ref must be finite");
  if (!(p.tol > 0.0)) throw UsageError("quadrature tolerance must be positive");
}

PointTransform::PointTransform(CoefficientSet cs, TransformParams p)
    : cs_(std::move(cs)), p_(p) {
  p_.n = cs_.n();
  validate(p_);
  const double n = p_.n;
  T_factor_ = std::pow(p_.C, (1.0 - n) / 2.0);
  F1_ = antiderivative(cs_.f1().as_function(), p_.t_ref, p_.tol);
  const Coefficient f3 = cs_.f3();
  const AntiderivativePtr F1 = F1_;
  const double f3_power = 2.0 / (n + 3.0);
  const double rate = (1.0 - n) / (n + 3.0);
  T_integral_ = antiderivative(
      [f3, F1, f3_power, rate](double xi) {
        return real_pow(f3(xi), f3_power) * std::exp(rate * (*F1)(xi));
      },
      p_.t_ref, p_.tol);
}

double PointTransform::T(double t) const { return T_factor_ * (*T_integral_)(t); }

double PointTransform::dT_dt(double t) const {
  const double n = p_.n;
  return T_factor_ * real_pow(cs_.f3()(t), 2.0 / (n + 3.0)) *
         std::exp((1.0 - n) / (n + 3.0) * (*F1_)(t));
}

double PointTransform::scale(double t) const {
  const double n = p_.n;
  return p_.C * real_pow(cs_.f3()(t), 1.0 / (n + 3.0)) * std::exp(2.0 / (n + 3.0) * (*F1_)(t));
}

double PointTransform::scale_log_derivative(double t) const {
  const double s = p_.n + 3.0;
  const double f3v = cs_.f3()(t);
  if (!(f3v > 0.0)) throw DomainError("f3 must be positive at t=" + format_real(t));
  return cs_.f3().derivative(t, 1) / (s * f3v) + 2.0 * cs_.f1()(t) / s;
}

double PointTransform::invert_T(double target, Interval bracket) const {
  double lo = bracket.lo;
  double hi = bracket.hi;
  double f_lo = T(lo) - target;
  double f_hi = T(hi) - target;
  const double tol = 1e-10 * (1.0 + std::abs(target));
  if (std::abs(f_lo) <= tol) return lo;
  if (std::abs(f_hi) <= tol) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw DomainError("T = " + format_real(target, 17) + " lies outside the image [" +
                      format_real(T(lo), 17) + ", " + format_real(T(hi), 17) + "] of the bracket");
  }
  // Illinois-modified regula falsi with a bisection fallback whenever the
  // secant point fails to shrink the bracket by half.
  int side = 0;
  for (int iter = 0; iter < 400; ++iter) {
    const double width = hi - lo;
    double t = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
    if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
    const double f = T(t) - target;
    if (std::abs(f) <= tol) return t;
    if ((f > 0.0) == (f_lo > 0.0)) {
      lo = t;
      f_lo = f;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    } else {
      hi = t;
      f_hi = f;
      if (side == 1) f_lo *= 0.5;
      side = 1;
    }
    if (hi - lo > 0.5 * width) {
      const double mid = 0.5 * (lo + hi);
      const double fm = T(mid) - target;
      if (std::abs(fm) <= tol) return mid;
      if ((fm > 0.0) == (f_lo > 0.0)) {
        lo = mid;
        f_lo = fm;
      } else {
        hi = mid;
        f_hi = fm;
      }
      side = 0;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(lo))) {
      break;
    }
  }
  return std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
}

CanonicalState PointTransform::to_canonical(double t, double x, double v) const {
  const double sc = scale(t);
  CanonicalState s;
  s.T = T(t);
  s.X = sc * x;
  s.dXdT = sc * (v + scale_log_derivative(t) * x) / dT_dt(t);
  return s;
}

double forward_T(const CoefficientSet& cs, const TransformParams& p, double t) {
  return PointTransform(cs, p).T(t);
}

double forward_X(const CoefficientSet& cs, const TransformParams& p, double x, double t) {
  return PointTransform(cs, p).X(x, t);
}

double invert_T(const CoefficientSet& cs, const TransformParams& p, double T, Interval bracket) {
  return PointTransform(cs, p).invert_T(T, bracket);
}

double canonical_energy(const CanonicalState& s, double n) {
  if (n == -1.0) throw UsageError("canonical energy is undefined for n = -1");
  return 0.5 * s.dXdT * s.dXdT + real_pow(s.X, n + 1.0) / (n + 1.0);
}

double canonical_particular_amplitude(double n) {
  require_admissible_exponent(n);
  if (!(n < -1.0)) {
    throw UsageError("the zero-energy particular solution is real only for n < -1 (got n = " +
                     format_real(n) + ")");
  }
  return real_pow(-(n - 1.0) * (n - 1.0) / (2.0 * (n + 1.0)), 1.0 / (1.0 - n));
}

double canonical_particular_X(double T, double T0, Branch eps, double n) {
  const double amplitude = canonical_particular_amplitude(n);
  const double s = sign_of(eps) * (T - T0);
  if (!(s > 0.0)) {
    throw DomainError("particular solution needs eps (T - T0) > 0; got " + format_real(s));
  }
  return std::pow(s, 2.0 / (1.0 - n)) * amplitude;
}

double canonical_T_of_X(double X, double C0, double T0, Branch eps, double n, double X_start,
                        double tol) {
  if (n == -1.0) throw UsageError("the quadrature solution requires n != -1");
  if (X == X_start) return T0;
  const double p = n + 1.0;
  auto radicand = [C0, p](double chi) {
    if (chi == 0.0) {
      return p > 0.0 ? 2.0 * C0 : std::numeric_limits<double>::infinity();
    }
    return 2.0 * (C0 - real_pow(chi, p) / p);
  };

  // Sample the open path for a sign change of the radicand.
  constexpr int kScan = 64;
  double prev_chi = X_start;
  if (radicand(X_start) < 0.0) {
    throw DomainError("radicand is negative at the start X = " + format_real(X_start));
  }
  for (int i = 1; i <= kScan; ++i) {
    const double chi = X_start + (X - X_start) * i / kScan;
    const double r = radicand(chi);
    if (r < 0.0 || (r == 0.0 && i < kScan)) {
      double a = prev_chi;
      double b = chi;
      for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (a + b);
        if (radicand(mid) > 0.0) {
          a = mid;
        } else {
          b = mid;
        }
      }
      throw DomainError("turning point at X = " + format_real(0.5 * (a + b), 15) +
                        " inside the integration path; only monotone branches are supported");
    }
    prev_chi = chi;
  }

  const double integral = integrate(
      [&radicand](double chi) {
        const double r = radicand(chi);
        if (!(r > 0.0)) throw DomainError("radicand non-positive at X = " + format_real(chi));
        return 1.0 / std::sqrt(r);
      },
      X_start, X, tol);
  return T0 + sign_of(eps) * integral;
}

}  // namespace anharmonic
