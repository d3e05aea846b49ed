#include "anharmonic/solutions.hpp"

#include <cmath>
#include <limits>

#include "anharmonic/error.hpp"

namespace anharmonic {

namespace {

void require_corollary_exponent(double n) {
  require_admissible_exponent(n);
  if (!(n < -1.0)) {
    throw UsageError("exact solution families are real only for n < -1 (got n = " +
                     format_real(n) + ")");
  }
}

bool is_corollary(Family f) { return f != Family::large_n; }

Interval compute_valid_t(Family family, const PointTransform& tr, const SolutionConstants& c,
                         Interval domain, double guard) {
  if (!is_corollary(family)) return domain;
  const double lo_T = tr.T(domain.lo);
  const double hi_T = tr.T(domain.hi);
  if (c.eps == Branch::plus) {
    const double threshold = c.T0 + guard;
    if (hi_T < threshold) {
      throw DomainError("no point of the domain satisfies T(t) - T0 >= guard (T(t_max) = " +
                        format_real(hi_T) + ", T0 = " + format_real(c.T0) + ")");
    }
    if (lo_T >= threshold) return domain;
    return {tr.invert_T(threshold, domain), domain.hi};
  }
  const double threshold = c.T0 - guard;
  if (lo_T > threshold) {
    throw DomainError("no point of the domain satisfies T0 - T(t) >= guard (T(t_min) = " +
                      format_real(lo_T) + ", T0 = " + format_real(c.T0) + ")");
  }
  if (hi_T <= threshold) return domain;
  return {domain.lo, tr.invert_T(threshold, domain)};
}

SolutionOptions with_domain(SolutionOptions opts, Interval domain) {
  opts.domain = domain;
  return opts;
}

DerivationOptions derivation_options(const SolutionOptions& opts) {
  DerivationOptions d;
  d.t_ref = opts.t_ref;
  d.domain = opts.domain;
  d.tol = opts.tol;
  d.guard = opts.guard;
  return d;
}

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::corollary1:
      return "c1";
    case Family::corollary2:
      return "c2";
    case Family::corollary3:
      return "c3";
    case Family::large_n:
      return "large-n";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  if (name == "c1") return Family::corollary1;
  if (name == "c2") return Family::corollary2;
  if (name == "c3") return Family::corollary3;
  if (name == "large-n") return Family::large_n;
  throw UsageError("unknown solution family '" + std::string(name) +
                   "' (expected c1, c2, c3 or large-n)");
}

ClosedFormSolution::ClosedFormSolution(Family family, CoefficientSet coefficients,
                                       SolutionConstants constants, SolutionOptions options,
                                       PoleReport poles)
    : family_(family),
      coefficients_(std::move(coefficients)),
      constants_(constants),
      options_(options),
      poles_(std::move(poles)) {
  TransformParams p;
  p.C = constants_.C;
  p.t_ref = options_.t_ref;
  p.n = coefficients_.n();
  p.tol = options_.tol;
  transform_ = std::make_shared<const PointTransform>(coefficients_, p);
  if (!(options_.guard > 0.0)) throw UsageError("guard distance must be positive");
  valid_t_ = compute_valid_t(family_, *transform_, constants_, coefficients_.domain(),
                             options_.guard);
}

double ClosedFormSolution::canonical_X(double t) const {
  const double n = this->n();
  const double T = transform_->T(t);
  if (family_ == Family::large_n) {
    return constants_.C * constants_.x0 * (T - constants_.T0);
  }
  const double s = sign_of(constants_.eps) * (T - constants_.T0);
  if (!(s > 0.0)) {
    throw DomainError("t = " + format_real(t, 15) + " is on the wrong side of T0 (eps (T - T0) = " +
                      format_real(s) + ")");
  }
  // x0 already carries the 1/C of the amplitude.
  return constants_.C * constants_.x0 * std::pow(s, 2.0 / (1.0 - n));
}

double ClosedFormSolution::operator()(double t) const {
  return canonical_X(t) / transform_->scale(t);
}

double ClosedFormSolution::singularity_distance(double t) const {
  double d = std::numeric_limits<double>::infinity();
  for (double p : poles_.poles) d = std::min(d, std::abs(t - p));
  if (is_corollary(family_)) {
    d = std::min(d, std::abs(transform_->T(t) - constants_.T0) / transform_->dT_dt(t));
  }
  return d;
}

ClosedFormSolution ClosedFormSolution::with_x0(double x0) const {
  ClosedFormSolution copy = *this;
  copy.constants_.x0 = x0;
  return copy;
}

ClosedFormSolution ClosedFormSolution::with_coefficients(CoefficientSet cs) const {
  ClosedFormSolution copy = *this;
  copy.coefficients_ = std::move(cs);
  return copy;
}

ClosedFormSolution corollary1_solution(const Expr& f1, const Expr& f3, double n,
                                       SolutionConstants constants, const SolutionOptions& opts) {
  require_corollary_exponent(n);
  constants.x0 = canonical_particular_amplitude(n) / constants.C;
  CoefficientSet cs(f1, derive_f2_case1(f1, f3, n), f3, n, opts.domain);
  return ClosedFormSolution(Family::corollary1, std::move(cs), constants, opts,
                            PoleReport{{}, opts.domain});
}

ClosedFormSolution corollary2_solution(const Expr& f3, double n, SolutionConstants constants,
                                       const SolutionOptions& opts) {
  require_corollary_exponent(n);
  if (!constants.C1) throw UsageError("corollary 2 needs the constant C1");
  constants.x0 = canonical_particular_amplitude(n) / constants.C;
  DerivedF1 derived = derive_f1_case2(f3, n, *constants.C1, derivation_options(opts));
  CoefficientSet cs(derived.f1, derive_f2_case2(f3, n), f3, n, derived.poles.usable);
  return ClosedFormSolution(Family::corollary2, std::move(cs), constants,
                            with_domain(opts, derived.poles.usable), derived.poles);
}

ClosedFormSolution corollary3_solution(const Expr& f1, double n, SolutionConstants constants,
                                       const SolutionOptions& opts) {
  require_corollary_exponent(n);
  if (!constants.C2) throw UsageError("corollary 3 needs the constant C2");
  if (!constants.f03) throw UsageError("corollary 3 needs the constant f03");
  constants.x0 = canonical_particular_amplitude(n) / constants.C;
  DerivedF3 derived = derive_f3_case3(f1, n, *constants.C2, *constants.f03,
                                      derivation_options(opts));
  CoefficientSet cs(f1, derive_f2_case3(f1, n), derived.f3, n, derived.poles.usable);
  return ClosedFormSolution(Family::corollary3, std::move(cs), constants,
                            with_domain(opts, derived.poles.usable), derived.poles);
}

ClosedFormSolution large_n_approx(const Expr& f1, const Expr& f3, double n,
                                  SolutionConstants constants, const SolutionOptions& opts) {
  require_admissible_exponent(n);
  if (!constants.C0 || !(*constants.C0 > 0.0)) {
    throw UsageError("the large-n approximation needs C0 > 0");
  }
  constants.x0 = sign_of(constants.eps) * std::sqrt(2.0 * *constants.C0) / constants.C;
  CoefficientSet cs(f1, derive_f2_case1(f1, f3, n), f3, n, opts.domain);
  return ClosedFormSolution(Family::large_n, std::move(cs), constants, opts,
                            PoleReport{{}, opts.domain});
}

double solution_derivative(const ClosedFormSolution& sol, double t) {
  const double h = std::min(1e-3, sol.singularity_distance(t) / 40.0);
  if (!(h > 0.0)) {
    throw DomainError("solution_derivative: t = " + format_real(t, 15) +
                      " sits on a singular point");
  }
  return richardson_diff1([&sol](double s) { return sol(s); }, t, h);
}

}  // namespace anharmonic
