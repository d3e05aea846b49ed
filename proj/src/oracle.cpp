#include "anharmonic/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "anharmonic/error.hpp"

namespace anharmonic {

namespace {

using State = std::array<double, 2>;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

class Rhs {
 public:
  explicit Rhs(const OdeProblem& p) : p_(p) {}
  State operator()(double t, const State& y) {
    ++evaluations;
    const double x = y[0];
    const double v = y[1];
    const double accel = -p_.f1(t) * v - p_.f2(t) * x - p_.f3(t) * real_pow(x, p_.n);
    if (!std::isfinite(accel)) throw DomainError("non-finite acceleration");
    return {v, accel};
  }
  std::size_t evaluations = 0;

 private:
  const OdeProblem& p_;
};

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
  State out = y;
  for (const auto& [w, k] : terms) {
    out[0] += h * w * (*k)[0];
    out[1] += h * w * (*k)[1];
  }
  return out;
}

double error_norm(const State& err, const State& y0, const State& y1, double rtol, double atol) {
  double sum = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    const double scale = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = err[i] / scale;
    sum += r * r;
  }
  return std::sqrt(sum / 2.0);
}

double state_norm(const State& y, const State& scale_from, double rtol, double atol) {
  double sum = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    const double r = y[i] / (atol + rtol * std::abs(scale_from[i]));
    sum += r * r;
  }
  return std::sqrt(sum / 2.0);
}

double initial_step(Rhs& f, double t, const State& y, const State& k1, double direction,
                    double span, double rtol, double atol) {
  const double d0 = state_norm(y, y, rtol, atol);
  const double d1n = state_norm(k1, y, rtol, atol);
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  h0 = std::min(h0, span);
  double h1 = h0;
  try {
    const State y1 = axpy(y, direction * h0, {{1.0, &k1}});
    const State k2 = f(t + direction * h0, y1);
    const State diff{k2[0] - k1[0], k2[1] - k1[1]};
    const double d2 = state_norm(diff, y, rtol, atol) / h0;
    const double dmax = std::max(d1n, d2);
    h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 5.0);
  } catch (const DomainError&) {
    h1 = h0 * 1e-3;
  }
  return std::min({100.0 * h0, h1, span});
}

}  // namespace

OdeProblem make_problem(const CoefficientSet& cs, double t0, double x0, double v0) {
  return OdeProblem{cs.f1().as_function(), cs.f2().as_function(), cs.f3().as_function(),
                    cs.n(),                t0,                      x0,
                    v0};
}

OdeProblem canonical_problem(double n, double T0, double X0, double V0) {
  auto zero = [](double) { return 0.0; };
  auto one = [](double) { return 1.0; };
  return OdeProblem{zero, zero, one, n, T0, X0, V0};
}

TrajectorySample Trajectory::at(double t) const {
  if (segments_.empty()) return samples_.front();
  const double lo = std::min(t_begin(), t_end());
  const double hi = std::max(t_begin(), t_end());
  if (t < lo || t > hi) {
    throw DomainError("dense output requested at t = " + format_real(t, 15) +
                      " outside the integrated span");
  }
  const bool forward = t_end() >= t_begin();
  // Segments are ordered along the direction of integration.
  auto it = std::lower_bound(segments_.begin(), segments_.end(), t,
                             [forward](const Segment& s, double value) {
                               const double end = s.t + s.h;
                               return forward ? end < value : end > value;
                             });
  if (it == segments_.end()) it = std::prev(segments_.end());
  const Segment& s = *it;
  const double theta = (t - s.t) / s.h;
  const double theta1 = 1.0 - theta;
  TrajectorySample out;
  out.t = t;
  double* dst[2] = {&out.x, &out.v};
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& r = s.rcont;
    *dst[i] = r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])));
  }
  return out;
}

Trajectory integrate_ivp(const OdeProblem& p, double t_end, double rtol, double atol) {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw UsageError("rtol and atol must be positive");
  if (!std::isfinite(t_end)) throw UsageError("t_end must be finite");

  Trajectory traj;
  traj.rtol = rtol;
  traj.atol = atol;
  Rhs f(p);
  double t = p.t0;
  State y{p.x0, p.v0};
  traj.samples_.push_back({t, y[0], y[1]});
  if (t_end == t) return traj;

  const double direction = t_end > t ? 1.0 : -1.0;
  const double span = std::abs(t_end - t);
  State k1;
  try {
    k1 = f(t, y);
  } catch (const DomainError& e) {
    throw IntegrationError(std::string("initial state outside the domain: ") + e.what(), t);
  }
  double h = initial_step(f, t, y, k1, direction, span, rtol, atol);
  bool last_rejected = false;
  constexpr std::size_t kMaxSteps = 50'000'000;

  while (direction * (t_end - t) > 0.0) {
    if (traj.accepted_steps + traj.rejected_steps > kMaxSteps) {
      throw IntegrationError("step budget exhausted", t);
    }
    const double min_step = 1e-14 * std::max(1.0, std::abs(t));
    if (h < min_step) {
      throw IntegrationError("step size underflow at t = " + format_real(t, 15) +
                                 " (pole or singular solution ahead)",
                             t);
    }
    bool final_step = false;
    if (h >= std::abs(t_end - t)) {
      h = std::abs(t_end - t);
      final_step = true;
    }
    const double hs = direction * h;

    State k2, k3, k4, k5, k6, y1, k7;
    double err = std::numeric_limits<double>::infinity();
    try {
      k2 = f(t + c2 * hs, axpy(y, hs, {{a21, &k1}}));
      k3 = f(t + c3 * hs, axpy(y, hs, {{a31, &k1}, {a32, &k2}}));
      k4 = f(t + c4 * hs, axpy(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      k5 = f(t + c5 * hs, axpy(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      k6 = f(t + hs, axpy(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      y1 = axpy(y, hs, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
      k7 = f(t + hs, y1);
      State e{};
      for (std::size_t i = 0; i < 2; ++i) {
        e[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      }
      err = error_norm(e, y, y1, rtol, atol);
    } catch (const DomainError&) {
      err = std::numeric_limits<double>::infinity();
    }

    if (!std::isfinite(err) || err > 1.0) {
      ++traj.rejected_steps;
      const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
      h *= fac;
      last_rejected = true;
      continue;
    }

    Trajectory::Segment seg;
    seg.t = t;
    seg.h = hs;
    for (std::size_t i = 0; i < 2; ++i) {
      const double ydiff = y1[i] - y[i];
      const double bspl = hs * k1[i] - ydiff;
      seg.rcont[0][i] = y[i];
      seg.rcont[1][i] = ydiff;
      seg.rcont[2][i] = bspl;
      seg.rcont[3][i] = ydiff - hs * k7[i] - bspl;
      seg.rcont[4][i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                              d7 * k7[i]);
    }
    traj.segments_.push_back(seg);

    t = final_step ? t_end : t + hs;
    y = y1;
    k1 = k7;
    traj.samples_.push_back({t, y[0], y[1]});
    ++traj.accepted_steps;

    double fac = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
    fac = std::clamp(fac, 0.2, 5.0);
    if (last_rejected) fac = std::min(fac, 1.0);
    h *= fac;
    last_rejected = false;
  }
  traj.rhs_evaluations = f.evaluations;
  return traj;
}

double residual(const CoefficientSet& cs, const RealFn& x, double t, double h) {
  if (!(h > 0.0)) throw UsageError("residual step must be positive");
  const double xv = x(t);
  const double dx = central_diff1(x, t, h);
  const double ddx = central_diff2(x, t, h);
  return ddx + cs.f1()(t) * dx + cs.f2()(t) * xv + cs.f3()(t) * real_pow(xv, cs.n());
}

VerificationReport verify(const ClosedFormSolution& sol, int grid_size,
                          const VerifyTolerances& tol) {
  VerificationReport rep;
  rep.tolerances = tol;
  rep.valid_t = sol.valid_t();
  if (rep.valid_t.empty()) throw UsageError("verify needs a non-degenerate valid interval");
  rep.grid = linspace(rep.valid_t.lo, rep.valid_t.hi, grid_size);
  const CoefficientSet& cs = sol.coefficients();
  const RealFn x_fn = [&sol](double t) { return sol(t); };

  const std::size_t m = rep.grid.size();
  rep.x_closed.resize(m);
  rep.residuals.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double t = rep.grid[i];
    const double h = std::min(tol.fd_step, sol.singularity_distance(t) / 40.0);
    const double x = sol(t);
    rep.x_closed[i] = x;
    const double scale = 1.0 + std::abs(cs.f3()(t) * real_pow(x, cs.n()));
    rep.residuals[i] = std::abs(residual(cs, x_fn, t, h)) / scale;
    rep.max_residual = std::max(rep.max_residual, rep.residuals[i]);
  }

  rep.x_oracle.assign(m, std::numeric_limits<double>::quiet_NaN());
  rep.deviations.assign(m, std::numeric_limits<double>::infinity());
  rep.energies.assign(m, std::numeric_limits<double>::quiet_NaN());
  rep.max_rel_deviation_vs_oracle = std::numeric_limits<double>::infinity();
  rep.energy_drift = std::numeric_limits<double>::infinity();
  try {
    const double t0 = rep.grid.front();
    const OdeProblem problem = make_problem(cs, t0, rep.x_closed.front(),
                                            solution_derivative(sol, t0));
    const Trajectory traj = integrate_ivp(problem, rep.grid.back(), tol.rtol, tol.atol);
    const PointTransform& tr = sol.transform();
    const double n = tr.params().n;
    double worst_dev = 0.0;
    double energy_scale = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const TrajectorySample s = traj.at(rep.grid[i]);
      rep.x_oracle[i] = s.x;
      rep.deviations[i] = std::abs(s.x - rep.x_closed[i]) /
                          std::max(std::abs(rep.x_closed[i]), std::numeric_limits<double>::min());
      worst_dev = std::max(worst_dev, rep.deviations[i]);
      const CanonicalState c = tr.to_canonical(s.t, s.x, s.v);
      rep.energies[i] = canonical_energy(c, n);
      energy_scale = std::max(energy_scale, 0.5 * c.dXdT * c.dXdT +
                                                std::abs(real_pow(c.X, n + 1.0) / (n + 1.0)));
    }
    double drift = 0.0;
    for (double e : rep.energies) drift = std::max(drift, std::abs(e - rep.energies.front()));
    rep.max_rel_deviation_vs_oracle = worst_dev;
    rep.energy_drift = energy_scale > 0.0 ? drift / energy_scale : drift;
  } catch (const Error& e) {
    rep.oracle_failure = e.what();
  }

  rep.pass = rep.oracle_failure.empty() && rep.max_residual <= tol.residual &&
             rep.max_rel_deviation_vs_oracle <= tol.deviation && rep.energy_drift <= tol.energy;
  return rep;
}

}  // namespace anharmonic
