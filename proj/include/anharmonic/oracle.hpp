#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "anharmonic/coefficient.hpp"
#include "anharmonic/solutions.hpp"

namespace anharmonic {

/// x'' + f1 x' + f2 x + f3 x^n = 0 with x(t0) = x0, x'(t0) = v0.
struct OdeProblem {
  RealFn f1;
  RealFn f2;
  RealFn f3;
  double n = 2.0;
  double t0 = 0.0;
  double x0 = 0.0;
  double v0 = 0.0;
};

OdeProblem make_problem(const CoefficientSet& cs, double t0, double x0, double v0);

/// X'' + X^n = 0 as an OdeProblem in T.
OdeProblem canonical_problem(double n, double T0, double X0, double V0);

struct TrajectorySample {
  double t = 0.0;
  double x = 0.0;
  double v = 0.0;
};

/// Accepted steps of an integration run plus the Dormand-Prince continuous
/// extension for every step.
class Trajectory {
 public:
  const std::vector<TrajectorySample>& samples() const { return samples_; }
  double t_begin() const { return samples_.front().t; }
  double t_end() const { return samples_.back().t; }

  /// Dense output at any t between t_begin() and t_end().
  TrajectorySample at(double t) const;

  double rtol = 0.0;
  double atol = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t rhs_evaluations = 0;

 private:
  friend Trajectory integrate_ivp(const OdeProblem&, double, double, double);
  struct Segment {
    double t = 0.0;
    double h = 0.0;
    // rcont[k][component], component 0 = x, 1 = v.
    std::array<std::array<double, 2>, 5> rcont{};
  };
  std::vector<TrajectorySample> samples_;
  std::vector<Segment> segments_;
};

/// Adaptive Dormand-Prince 5(4) integration from p.t0 to t_end (either
/// direction), local error bounded by rtol |y| + atol per component.
///
/// A stage that leaves the coefficients' or the power's domain rejects the
/// step. Throws IntegrationError (with the last accepted t) when the step
/// size underflows, which is how poles and collisions surface.
Trajectory integrate_ivp(const OdeProblem& p, double t_end, double rtol = 1e-10,
                         double atol = 1e-12);

/// Defect x'' + f1 x' + f2 x + f3 x^n of a candidate solution, derivatives by
/// five-point central differences with step h.
double residual(const CoefficientSet& cs, const RealFn& x, double t, double h);

struct VerifyTolerances {
  double rtol = 1e-10;
  double atol = 1e-12;
  /// Bound on |residual| / (1 + |f3 x^n|).
  double residual = 1e-6;
  /// Bound on |x_oracle - x| / |x|.
  double deviation = 1e-6;
  /// Bound on the canonical energy drift (see VerificationReport).
  double energy = 1e-8;
  /// Largest finite-difference step for residuals; shrunk near singular points.
  double fd_step = 1e-3;
};

struct VerificationReport {
  std::vector<double> grid;
  std::vector<double> x_closed;
  std::vector<double> x_oracle;
  std::vector<double> residuals;   // normalized
  std::vector<double> deviations;  // relative
  std::vector<double> energies;    // canonical energy of the oracle path
  double max_residual = 0.0;
  double max_rel_deviation_vs_oracle = 0.0;
  /// max |E - E(start)| / max (|X'^2/2| + |X^(n+1)/(n+1)|) along the
  /// oracle path in canonical coordinates.
  double energy_drift = 0.0;
  Interval valid_t;
  VerifyTolerances tolerances;
  std::string oracle_failure;
  bool pass = false;
};

/// Checks a closed-form solution against its ODE three ways: pointwise
/// residual, agreement with integrate_ivp seeded from the closed form at the
/// first grid point, and conservation of the canonical energy along that
/// oracle path.
VerificationReport verify(const ClosedFormSolution& sol, int grid_size,
                          const VerifyTolerances& tol = {});

}  // namespace anharmonic
