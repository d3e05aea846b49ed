#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>

#include "anharmonic/numeric.hpp"

namespace anharmonic {

inline constexpr double kDefaultQuadratureTol = 1e-10;
inline constexpr std::size_t kMaxSubdivisions = 1'000'000;

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
  std::size_t evaluations = 0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature of f over [a, b].
///
/// Meets |est - true| <= tol * (1 + |est|) as judged by the embedded error
/// estimate. Endpoints are never evaluated, so integrable endpoint
/// singularities are handled by subdivision. Swapping a and b negates the
/// result exactly; a == b returns exactly 0.
///
/// Throws QuadratureError (carrying the worst subinterval) when the
/// subdivision budget runs out, and propagates DomainError from f.
QuadratureResult integrate_detailed(const RealFn& f, double a, double b,
                                    double tol = kDefaultQuadratureTol,
                                    std::size_t max_intervals = kMaxSubdivisions);

double integrate(const RealFn& f, double a, double b, double tol = kDefaultQuadratureTol);

/// t -> integral of f from t_ref to t, with a checkpoint cache.
///
/// Each evaluation integrates from the nearest cached point and records the
/// result, so sweeps over nearby points cost one short quadrature each.
/// Values already returned never change. The cache is guarded by a mutex;
/// the integrand itself must tolerate being called from the evaluating
/// thread.
///
/// The base point stands in for the unspecified lower limit of an indefinite
/// integral. Moving it shifts the value by a constant, which callers absorb
/// into their free constants.
class Antiderivative {
 public:
  Antiderivative(RealFn integrand, double t_ref, double tol = kDefaultQuadratureTol);

  double operator()(double t) const;
  double eval(double t) const { return (*this)(t); }

  double t_ref() const { return t_ref_; }
  double tol() const { return tol_; }
  const RealFn& integrand() const { return integrand_; }
  std::size_t checkpoint_count() const;

 private:
  RealFn integrand_;
  double t_ref_;
  double tol_;
  mutable std::mutex mutex_;
  mutable std::map<double, double> checkpoints_;
};

using AntiderivativePtr = std::shared_ptr<const Antiderivative>;

AntiderivativePtr antiderivative(RealFn f, double t_ref, double tol = kDefaultQuadratureTol);

}  // namespace anharmonic
