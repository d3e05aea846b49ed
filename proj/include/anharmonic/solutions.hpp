#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "anharmonic/integrability.hpp"
#include "anharmonic/transform.hpp"

namespace anharmonic {

enum class Family { corollary1, corollary2, corollary3, large_n };

/// "c1", "c2", "c3", "large-n".
std::string_view family_name(Family f);
Family parse_family(std::string_view name);

/// Free constants of a solution family. x0 is filled in by the builders.
struct SolutionConstants {
  double C = 1.0;
  double T0 = 0.0;
  Branch eps = Branch::plus;
  std::optional<double> C1;   // corollary 2
  std::optional<double> C2;   // corollary 3
  std::optional<double> f03;  // corollary 3
  std::optional<double> C0;   // large-n
  double x0 = 0.0;
};

struct SolutionOptions {
  Interval domain{0.0, 1.0};
  double t_ref = 0.0;
  double tol = kDefaultQuadratureTol;
  /// Exclusion radius around T = T0 (in T) and around poles (in t).
  double guard = 1e-3;
};

/// One member of an exact (or large-n approximate) solution family,
/// evaluable anywhere in valid_t().
///
/// Every family is evaluated as x(t) = X(T(t)) / scale(t) through the point
/// transformation, with X the canonical solution; the corollary families use
/// the zero-energy particular solution. valid_t() is the requested domain
/// cut back to the pole-free piece around t_ref and to eps (T - T0) >= guard.
///
/// The antiderivative caches are shared between copies; evaluation is
/// logically const.
class ClosedFormSolution {
 public:
  ClosedFormSolution(Family family, CoefficientSet coefficients, SolutionConstants constants,
                     SolutionOptions options, PoleReport poles);

  Family family() const { return family_; }
  /// The ODE this solution claims to satisfy.
  const CoefficientSet& coefficients() const { return coefficients_; }
  const SolutionConstants& constants() const { return constants_; }
  const SolutionOptions& options() const { return options_; }
  const Interval& valid_t() const { return valid_t_; }
  const PoleReport& poles() const { return poles_; }
  double t_ref() const { return options_.t_ref; }
  /// Exponent the closed form was built with.
  double n() const { return transform_->params().n; }
  const PointTransform& transform() const { return *transform_; }

  double operator()(double t) const;
  double T(double t) const { return transform_->T(t); }
  /// Canonical coordinate X(T(t)) predicted by the family.
  double canonical_X(double t) const;

  /// Estimated t-distance to the nearest singular point (T = T0 or a pole).
  double singularity_distance(double t) const;

  /// Copy with a different amplitude (used for negative controls).
  ClosedFormSolution with_x0(double x0) const;
  /// Copy that claims to solve a different coefficient set.
  ClosedFormSolution with_coefficients(CoefficientSet cs) const;

 private:
  Family family_;
  CoefficientSet coefficients_;
  SolutionConstants constants_;
  SolutionOptions options_;
  PoleReport poles_;
  std::shared_ptr<const PointTransform> transform_;
  Interval valid_t_;
};

/// Corollary 1: f2 is derive_f2_case1(f1, f3, n). Requires n < -1.
ClosedFormSolution corollary1_solution(const Expr& f1, const Expr& f3, double n,
                                       SolutionConstants constants, const SolutionOptions& opts);

/// Corollary 2: f1 from the case-2 Bernoulli solution (constants.C1), f2 from
/// derive_f2_case2. Requires n < -1.
ClosedFormSolution corollary2_solution(const Expr& f3, double n, SolutionConstants constants,
                                       const SolutionOptions& opts);

/// Corollary 3: f3 from the case-3 Bernoulli solution (constants.C2,
/// constants.f03), f2 from derive_f2_case3. Requires n < -1.
ClosedFormSolution corollary3_solution(const Expr& f1, double n, SolutionConstants constants,
                                       const SolutionOptions& opts);

/// Large-n approximation X ~ eps sqrt(2 C0) (T - T0) pulled back through the
/// transformation; f2 is derive_f2_case1(f1, f3, n). Meant for n >= 20 and
/// small |X|. Requires constants.C0 > 0.
ClosedFormSolution large_n_approx(const Expr& f1, const Expr& f3, double n,
                                  SolutionConstants constants, const SolutionOptions& opts);

/// dx/dt by Richardson-extrapolated five-point differences. The step is
/// min(1e-3, d/40), d the distance to the nearest singular point.
double solution_derivative(const ClosedFormSolution& sol, double t);

}  // namespace anharmonic
