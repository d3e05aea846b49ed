#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace anharmonic {

using RealFn = std::function<double(double)>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double t) const { return t >= lo && t <= hi; }
  bool empty() const { return !(hi > lo); }
};

/// base^exponent over the reals. Negative bases are accepted only for
/// integer exponents; 0 to a negative power is a domain error.
double real_pow(double base, double exponent);

/// `count` evenly spaced points from lo to hi inclusive (count >= 2).
std::vector<double> linspace(double lo, double hi, int count);

/// Five-point central difference for f'(t).
double central_diff1(const RealFn& f, double t, double h);

/// Five-point central difference for f''(t).
double central_diff2(const RealFn& f, double t, double h);

/// Richardson combination of central_diff1 at h and h/2 (error O(h^6)).
double richardson_diff1(const RealFn& f, double t, double h);

/// Richardson combination of central_diff2 at h and h/2.
double richardson_diff2(const RealFn& f, double t, double h);

/// Theorem hypothesis: n must avoid {-3, -1, 0, 1}. Throws UsageError.
void require_admissible_exponent(double n);
bool is_excluded_exponent(double n);

/// "%.*g" formatting used by every report and table.
std::string format_real(double v, int significant_digits = 12);

}  // namespace anharmonic
