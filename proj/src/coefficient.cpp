#include "anharmonic/coefficient.hpp"

#include <cmath>

#include "anharmonic/error.hpp"

namespace anharmonic {

Coefficient::Coefficient() : Coefficient(Expr::constant(0.0)) {}

Coefficient::Coefficient(double constant) : Coefficient(Expr::constant(constant)) {}

Coefficient::Coefficient(Expr e) : expr_(e) {
  const Expr d1 = differentiate(e);
  const Expr d2 = differentiate(d1);
  jets_ = {e, d1, d2};
}

Coefficient Coefficient::derived(RealFn value, std::vector<RealFn> derivatives, std::string label) {
  Coefficient c;
  c.expr_.reset();
  c.jets_.clear();
  c.jets_.push_back(std::move(value));
  for (auto& d : derivatives) c.jets_.push_back(std::move(d));
  c.label_ = std::move(label);
  return c;
}

double derived_fd_step(double t) { return std::max(1e-5, 1e-5 * std::abs(t)); }

double Coefficient::derivative(double t, int order) const {
  if (order < 0 || order > 2) throw UsageError("coefficient derivative order must be 0, 1 or 2");
  const int known = exact_orders();
  if (order <= known) return jets_[static_cast<std::size_t>(order)](t);
  const RealFn& top = jets_.back();
  if (order - known == 1) return central_diff1(top, t, derived_fd_step(t));
  // Second difference of a value-only function: a wider step keeps the
  // 1/h^2 round-off amplification in check.
  const double h = std::max(1e-3, 1e-3 * std::abs(t));
  return central_diff2(top, t, h);
}

std::string Coefficient::describe() const {
  if (expr_) return render(*expr_);
  return label_.empty() ? "<derived>" : label_;
}

CoefficientSet::CoefficientSet(Coefficient f1, Coefficient f2, Coefficient f3, double n,
                               Interval domain)
    : f1_(std::move(f1)), f2_(std::move(f2)), f3_(std::move(f3)), n_(n), domain_(domain) {
  require_admissible_exponent(n_);
  if (!std::isfinite(domain_.lo) || !std::isfinite(domain_.hi) || domain_.hi < domain_.lo) {
    throw UsageError("coefficient domain must be a finite interval with lo <= hi");
  }
  const int samples = domain_.hi > domain_.lo ? 257 : 2;
  for (double t : linspace(domain_.lo, domain_.hi, samples)) {
    (void)f1_(t);
    (void)f2_(t);
    const double v = f3_(t);
    if (!(v > 0.0)) {
      throw DomainError("f3 must be positive on the domain; f3(" + format_real(t) +
                        ") = " + format_real(v));
    }
  }
}

CoefficientSet CoefficientSet::with_exponent(double n) const {
  return CoefficientSet(f1_, f2_, f3_, n, domain_);
}

CoefficientSet CoefficientSet::with_domain(Interval domain) const {
  return CoefficientSet(f1_, f2_, f3_, n_, domain);
}

}  // namespace anharmonic
