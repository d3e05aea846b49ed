#include "anharmonic/quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "anharmonic/error.hpp"

namespace anharmonic {

namespace {

// Kronrod abscissae (descending) and weights; every odd index is also a
// 7-point Gauss node.
constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod_15(const RealFn& f, double lo, double hi) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  std::array<double, 7> left{};
  std::array<double, 7> right{};
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  double abs_sum = std::abs(kronrod);
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    left[j] = f(center - dx);
    right[j] = f(center + dx);
    kronrod += kWgk[j] * (left[j] + right[j]);
    abs_sum += kWgk[j] * (std::abs(left[j]) + std::abs(right[j]));
    if (j % 2 == 1) gauss += kWg[j / 2] * (left[j] + right[j]);
  }
  const double mean = 0.5 * kronrod;
  double asc = kWgk[7] * std::abs(fc - mean);
  for (std::size_t j = 0; j < 7; ++j) {
    asc += kWgk[j] * (std::abs(left[j] - mean) + std::abs(right[j] - mean));
  }

  const double value = kronrod * half;
  const double resabs = abs_sum * std::abs(half);
  const double resasc = asc * std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * resabs, err);
  }
  return {lo, hi, value, err};
}

bool splittable(const Panel& p) {
  const double mid = 0.5 * (p.lo + p.hi);
  return mid > p.lo && mid < p.hi;
}

}  // namespace

QuadratureResult integrate_detailed(const RealFn& f, double a, double b, double tol,
                                    std::size_t max_intervals) {
  if (!(tol > 0.0)) throw UsageError("quadrature tolerance must be positive");
  if (a == b) return {};
  if (b < a) {
    QuadratureResult r = integrate_detailed(f, b, a, tol, max_intervals);
    r.value = -r.value;
    return r;
  }

  std::priority_queue<Panel> heap;
  std::vector<Panel> frozen;  // panels too narrow to split further
  Panel first = gauss_kronrod_15(f, a, b);
  double total = first.value;
  double total_err = first.error;
  std::size_t evaluations = 15;
  heap.push(first);

  while (total_err > tol * (1.0 + std::abs(total))) {
    if (heap.empty()) {
      const Panel& worst = frozen.front();
      throw QuadratureError("quadrature cannot reach tolerance: subinterval [" +
                                format_real(worst.lo, 17) + ", " + format_real(worst.hi, 17) +
                                "] is at floating-point resolution (singularity?)",
                            worst.lo, worst.hi);
    }
    if (heap.size() + frozen.size() >= max_intervals) {
      const Panel& worst = heap.top();
      throw QuadratureError("quadrature did not converge within " +
                                std::to_string(max_intervals) + " subintervals; worst [" +
                                format_real(worst.lo, 17) + ", " + format_real(worst.hi, 17) +
                                "]",
                            worst.lo, worst.hi);
    }
    Panel worst = heap.top();
    heap.pop();
    if (!splittable(worst)) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Panel left = gauss_kronrod_15(f, worst.lo, mid);
    const Panel right = gauss_kronrod_15(f, mid, worst.hi);
    evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum from the panels to shed the drift of the running updates.
  double sum = 0.0;
  double err = 0.0;
  const std::size_t count = heap.size() + frozen.size();
  for (const auto& p : frozen) {
    sum += p.value;
    err += p.error;
  }
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {sum, err, count, evaluations};
}

double integrate(const RealFn& f, double a, double b, double tol) {
  return integrate_detailed(f, a, b, tol).value;
}

Antiderivative::Antiderivative(RealFn integrand, double t_ref, double tol)
    : integrand_(std::move(integrand)), t_ref_(t_ref), tol_(tol) {
  if (!(tol > 0.0)) throw UsageError("antiderivative tolerance must be positive");
  if (!std::isfinite(t_ref)) throw UsageError("antiderivative base point must be finite");
  checkpoints_.emplace(t_ref, 0.0);
}

double Antiderivative::operator()(double t) const {
  if (!std::isfinite(t)) throw DomainError("antiderivative evaluated at non-finite t");
  double start = 0.0;
  double base = 0.0;
  {
    std::lock_guard lock(mutex_);
    auto hi = checkpoints_.lower_bound(t);
    if (hi != checkpoints_.end() && hi->first == t) return hi->second;
    if (hi == checkpoints_.end()) {
      --hi;
      start = hi->first;
      base = hi->second;
    } else if (hi == checkpoints_.begin()) {
      start = hi->first;
      base = hi->second;
    } else {
      auto lo = std::prev(hi);
      const bool take_lo = (t - lo->first) <= (hi->first - t);
      start = take_lo ? lo->first : hi->first;
      base = take_lo ? lo->second : hi->second;
    }
  }
  const double value = base + integrate(integrand_, start, t, tol_);
  std::lock_guard lock(mutex_);
  // Another thread may have filled t meanwhile; keep the first value.
  const auto [it, inserted] = checkpoints_.emplace(t, value);
  return it->second;
}

std::size_t Antiderivative::checkpoint_count() const {
  std::lock_guard lock(mutex_);
  return checkpoints_.size();
}

AntiderivativePtr antiderivative(RealFn f, double t_ref, double tol) {
  return std::make_shared<const Antiderivative>(std::move(f), t_ref, tol);
}

}  // namespace anharmonic
