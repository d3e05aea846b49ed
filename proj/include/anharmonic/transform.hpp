#pragma once

#include "anharmonic/coefficient.hpp"
#include "anharmonic/quadrature.hpp"

namespace anharmonic {

/// Sign choice for the two branches of the canonical solution.
enum class Branch : int { plus = 1, minus = -1 };

inline double sign_of(Branch b) { return b == Branch::plus ? 1.0 : -1.0; }

struct TransformParams {
  double C = 1.0;      // free scale constant, > 0
  double t_ref = 0.0;  // base point of every nested integral
  double n = 2.0;
  double tol = kDefaultQuadratureTol;
};

void validate(const TransformParams& p);

struct CanonicalState {
  double X = 0.0;
  double dXdT = 0.0;
  double T = 0.0;
};

/// The point transformation taking x'' + f1 x' + f2 x + f3 x^n = 0 to
/// X'' + X^n = 0 (derivatives in T):
///
///   X = C x f3^(1/(n+3)) exp(2/(n+3) F1)
///   T = C^((1-n)/2) * integral of f3^(2/(n+3)) exp((1-n)/(n+3) F1)
///
/// with F1 the antiderivative of f1 from t_ref and T(t_ref) = 0. The two
/// antiderivatives are cached and shared by copies.
class PointTransform {
 public:
  PointTransform(CoefficientSet cs, TransformParams p);

  double T(double t) const;
  double dT_dt(double t) const;
  /// X = scale(t) * x.
  double X(double x, double t) const { return scale(t) * x; }
  double x_from_X(double X, double t) const { return X / scale(t); }
  double scale(double t) const;
  /// d/dt ln scale(t) = f3'/((n+3) f3) + 2 f1/(n+3).
  double scale_log_derivative(double t) const;
  double f1_integral(double t) const { return (*F1_)(t); }

  /// Bracketed root of T(t) = target; |T(t) - target| <= 1e-10 (1 + |target|).
  double invert_T(double target, Interval bracket) const;

  /// (t, x, dx/dt) -> (T, X, dX/dT).
  CanonicalState to_canonical(double t, double x, double v) const;

  const CoefficientSet& coefficients() const { return cs_; }
  const TransformParams& params() const { return p_; }

 private:
  CoefficientSet cs_;
  TransformParams p_;
  double T_factor_;
  AntiderivativePtr F1_;
  AntiderivativePtr T_integral_;
};

double forward_T(const CoefficientSet& cs, const TransformParams& p, double t);
double forward_X(const CoefficientSet& cs, const TransformParams& p, double x, double t);
double invert_T(const CoefficientSet& cs, const TransformParams& p, double T, Interval bracket);

/// E = (dX/dT)^2 / 2 + X^(n+1)/(n+1); conserved by X'' + X^n = 0.
double canonical_energy(const CanonicalState& s, double n);

/// [-(n-1)^2 / (2(n+1))]^(1/(1-n)); real only for n < -1.
double canonical_particular_amplitude(double n);

/// X(T) = [eps (T - T0)]^(2/(1-n)) * canonical_particular_amplitude(n),
/// the zero-energy solution. Requires n < -1, n != -3 and eps (T - T0) > 0.
double canonical_particular_X(double T, double T0, Branch eps, double n);

/// T = T0 + eps * integral from X_start to X of dchi / sqrt(2 (C0 - chi^(n+1)/(n+1))).
///
/// Valid on a monotone branch only: a radicand that turns negative on the
/// path is reported as a turning point (DomainError). The radicand may vanish
/// at an endpoint.
double canonical_T_of_X(double X, double C0, double T0, Branch eps, double n, double X_start = 0.0,
                        double tol = kDefaultQuadratureTol);

}  // namespace anharmonic
