#include <doctest.h>

#include <cmath>
#include <numbers>

#include "anharmonic/error.hpp"
#include "anharmonic/oracle.hpp"
#include "anharmonic/solutions.hpp"

using namespace anharmonic;

namespace {

SolutionOptions opts(double lo, double hi) {
  SolutionOptions o;
  o.domain = {lo, hi};
  return o;
}

}  // namespace

TEST_CASE("integrate_ivp: harmonic limit") {
  OdeProblem p;
  p.f1 = [](double) { return 0.0; };
  p.f2 = [](double) { return 1.0; };
  p.f3 = [](double) { return 1e-30; };
  p.n = 2.0;
  p.x0 = 1.0;
  const auto tr = integrate_ivp(p, std::numbers::pi);
  CHECK(std::abs(tr.samples().back().x + 1.0) <= 1e-8);
  CHECK(tr.t_end() == std::numbers::pi);
  for (double t : {0.1, 1.0, 2.5}) {
    CHECK(std::abs(tr.at(t).x - std::cos(t)) <= 1e-8);
    CHECK(std::abs(tr.at(t).v + std::sin(t)) <= 1e-8);
  }
  const auto back = integrate_ivp(p, -2.0);
  CHECK(std::abs(back.at(-1.0).x - std::cos(1.0)) <= 1e-8);
  CHECK_THROWS_AS(tr.at(4.0), DomainError);
}

TEST_CASE("integrate_ivp: canonical n = -2 matches the particular solution") {
  const double a = canonical_particular_amplitude(-2);
  const auto p = canonical_problem(-2, 1.0, a, 2.0 / 3.0 * a);
  const auto tr = integrate_ivp(p, 4.0);
  CHECK(std::abs(tr.samples().back().x - 4.16017) <= 1e-5);
  CHECK(std::abs(tr.samples().back().x - a * std::pow(4.0, 2.0 / 3.0)) <= 1e-7);
}

TEST_CASE("integrate_ivp: collision surfaces as an integration error") {
  const auto p = canonical_problem(-2, 0.0, 1.0, 0.0);
  try {
    integrate_ivp(p, 3.0);
    FAIL("expected an integration error");
  } catch (const IntegrationError& e) {
    // Free fall from X = 1 under X^-2 reaches 0 at T = pi / (2 sqrt 2).
    CHECK(e.last_good_t() == doctest::Approx(std::numbers::pi / (2.0 * std::sqrt(2.0))).epsilon(1e-3));
  }
  CHECK_THROWS_AS(integrate_ivp(p, 1.0, 0.0, 1e-12), UsageError);
}

TEST_CASE("residual") {
  const CoefficientSet cs(Coefficient(0.0), Coefficient(0.0), Coefficient(1.0), 2, {0.0, 1.0});
  CHECK(residual(cs, [](double) { return 3.0; }, 0.5, 1e-3) == doctest::Approx(9.0));

  const auto sol = corollary1_solution(parse("0"), parse("1"), -2, {}, opts(0.0, 10.0));
  const auto& c = sol.coefficients();
  auto x = [&](double t) { return sol(t); };
  auto bad = [&](double t) { return sol(t) + 0.01 * std::sin(t); };
  for (double t : {0.5, 2.0, 7.0}) {
    CHECK(std::abs(residual(c, x, t, 1e-3)) <= 1e-6);
    CHECK(std::abs(residual(c, bad, t, 1e-3)) >= 1e-3);
  }
}

TEST_CASE("verify: flat corollary 1") {
  const auto sol = corollary1_solution(parse("0"), parse("1"), -2, {}, opts(0.5, 8.0));
  const auto rep = verify(sol, 50);
  CHECK(rep.pass);
  CHECK(rep.grid.size() == 50);
  CHECK(rep.max_rel_deviation_vs_oracle <= 1e-6);
  CHECK(rep.max_residual <= 1e-6);
  CHECK(rep.energy_drift <= 1e-8);
  CHECK(rep.oracle_failure.empty());
  for (std::size_t i = 0; i < rep.grid.size(); ++i) {
    CHECK(rep.x_closed[i] == doctest::Approx(std::cbrt(4.5) * std::pow(rep.grid[i], 2.0 / 3.0)));
  }
}

TEST_CASE("verify: corollary 2 on the pole-free side") {
  SolutionConstants c;
  c.C1 = 1.0;
  c.T0 = -0.5;
  const auto sol = corollary2_solution(parse("1"), -2, c, opts(0.0, 0.9 - 1e-3));
  const auto rep = verify(sol, 50);
  CHECK(rep.pass);
}

TEST_CASE("verify: negative controls") {
  const auto sol = corollary1_solution(parse("0.1"), parse("exp(t/10)"), -2, {}, opts(0.5, 4.0));
  CHECK(verify(sol, 50).pass);
  const auto off = verify(sol.with_x0(sol.constants().x0 * 1.01), 50);
  CHECK_FALSE(off.pass);
  CHECK(off.max_residual > off.tolerances.residual);
  const auto wrong_n = verify(sol.with_coefficients(sol.coefficients().with_exponent(-1.9)), 50);
  CHECK_FALSE(wrong_n.pass);
}

TEST_CASE("solution_derivative agrees with the oracle velocity") {
  const auto sol = corollary1_solution(parse("0.2"), parse("1+t^2"), -2.5, {}, opts(0.2, 2.0));
  const double t0 = sol.valid_t().lo;
  const auto p = make_problem(sol.coefficients(), t0, sol(t0), solution_derivative(sol, t0));
  const auto tr = integrate_ivp(p, 2.0);
  for (double t : {0.5, 1.0, 1.9}) {
    CHECK(std::abs(tr.at(t).v - solution_derivative(sol, t)) <= 1e-6 * (1.0 + std::abs(tr.at(t).v)));
  }
}
