#include "anharmonic/numeric.hpp"

#include <array>
#include <cstdio>

#include "anharmonic/error.hpp"

namespace anharmonic {

double real_pow(double base, double exponent) {
  if (base < 0.0 && exponent != std::floor(exponent)) {
    throw DomainError("non-integer power " + format_real(exponent) + " of negative base " +
                      format_real(base));
  }
  if (base == 0.0 && exponent < 0.0) {
    throw DomainError("zero raised to negative power " + format_real(exponent));
  }
  return std::pow(base, exponent);
}

std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 2) {
    throw UsageError("grid needs at least 2 points");
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  const double step = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = lo + step * i;
  }
  out.back() = hi;
  return out;
}

double central_diff1(const RealFn& f, double t, double h) {
  return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h);
}

double central_diff2(const RealFn& f, double t, double h) {
  return (-f(t + 2 * h) + 16 * f(t + h) - 30 * f(t) + 16 * f(t - h) - f(t - 2 * h)) /
         (12 * h * h);
}

double richardson_diff1(const RealFn& f, double t, double h) {
  const double coarse = central_diff1(f, t, h);
  const double fine = central_diff1(f, t, h / 2);
  return (16 * fine - coarse) / 15;
}

double richardson_diff2(const RealFn& f, double t, double h) {
  const double coarse = central_diff2(f, t, h);
  const double fine = central_diff2(f, t, h / 2);
  return (16 * fine - coarse) / 15;
}

bool is_excluded_exponent(double n) {
  constexpr std::array<double, 4> excluded{-3.0, -1.0, 0.0, 1.0};
  for (double e : excluded) {
    if (std::abs(n - e) < 1e-12) return true;
  }
  return false;
}

void require_admissible_exponent(double n) {
  if (!std::isfinite(n)) {
    throw UsageError("exponent n must be finite");
  }
  if (is_excluded_exponent(n)) {
    throw UsageError("exponent n = " + format_real(n) +
                     " is excluded: the transformation requires n not in {-3, -1, 0, 1}");
  }
}

std::string format_real(double v, int significant_digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant_digits, v);
  return buf;
}

}  // namespace anharmonic
