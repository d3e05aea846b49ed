#include <doctest.h>

#include <cmath>

#include "anharmonic/error.hpp"
#include "anharmonic/oracle.hpp"
#include "anharmonic/solutions.hpp"

using namespace anharmonic;

namespace {

SolutionOptions opts(double lo, double hi, double t_ref = 0.0) {
  SolutionOptions o;
  o.domain = {lo, hi};
  o.t_ref = t_ref;
  return o;
}

// Composite Simpson on [a, b], even panel count.
template <class F>
double simpson(F f, double a, double b, int panels = 2000) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("family names") {
  CHECK(family_name(Family::large_n) == "large-n");
  CHECK(parse_family("c2") == Family::corollary2);
  CHECK_THROWS_AS(parse_family("c4"), UsageError);
}

TEST_CASE("corollary 1: flat coefficients reduce to the canonical solution") {
  const auto sol = corollary1_solution(parse("0"), parse("1"), -2, {}, opts(0.0, 10.0));
  CHECK(sol(1.0) == doctest::Approx(1.650963624).epsilon(1e-9));
  CHECK(sol(8.0) == doctest::Approx(6.603854497).epsilon(1e-9));
  CHECK(std::abs(solution_derivative(sol, 1.0) - 1.100642416) <= 1e-8);
  CHECK(sol.valid_t().lo == doctest::Approx(1e-3));
  CHECK_THROWS_AS(sol(-0.5), DomainError);
  CHECK_THROWS_AS(corollary1_solution(parse("0"), parse("1"), -1, {}, opts(0.0, 1.0)), UsageError);
  CHECK_THROWS_AS(corollary1_solution(parse("0"), parse("1"), 2, {}, opts(0.0, 1.0)), UsageError);
}

TEST_CASE("corollary 1: minus branch lives before T0") {
  SolutionConstants c;
  c.eps = Branch::minus;
  c.T0 = 2.0;
  const auto sol = corollary1_solution(parse("0"), parse("1"), -2, c, opts(0.0, 5.0));
  CHECK(sol.valid_t().hi == doctest::Approx(2.0 - 1e-3));
  CHECK(sol(1.0) == doctest::Approx(1.650963624).epsilon(1e-9));
}

TEST_CASE("corollary 1: residual on a non-trivial set") {
  const auto sol = corollary1_solution(parse("1/10"), parse("exp(t/10)"), -2, {}, opts(0.1, 3.0));
  const auto& cs = sol.coefficients();
  for (double t : linspace(sol.valid_t().lo + 0.01, sol.valid_t().hi, 50)) {
    const double x = sol(t);
    const double r = residual(cs, [&](double s) { return sol(s); }, t, 1e-3);
    CHECK(std::abs(r) <= 1e-6 * (1.0 + std::abs(cs.f3()(t) * std::pow(x, -2.0))));
  }
}

TEST_CASE("corollary 1: t_ref changes are absorbed") {
  const double n = -2.0;
  const auto a = corollary1_solution(parse("0.3"), parse("exp(t/10)"), n, {}, opts(0.5, 3.0));
  const double t_new = 0.4;
  const double delta = 0.3 * t_new;
  SolutionConstants c;
  c.C = std::exp(2.0 * delta / (n + 3.0));
  c.T0 = -a.T(t_new);
  const auto b = corollary1_solution(parse("0.3"), parse("exp(t/10)"), n, c, opts(0.5, 3.0, t_new));
  for (double t : {0.6, 1.3, 2.9}) CHECK(std::abs(a(t) - b(t)) <= 1e-9 * std::abs(a(t)));
}

TEST_CASE("corollary 2") {
  SolutionConstants c;
  c.C1 = 1.0;
  c.T0 = -0.5;
  const auto sol = corollary2_solution(parse("1"), -2, c, opts(0.0, 2.0));
  CHECK(sol.poles().truncated());
  CHECK(sol.valid_t().hi == doctest::Approx(1.0 - 1e-3));
  CHECK(sol.coefficients().f1()(0.5) == doctest::Approx(2.0));
  CHECK(max_condition_residual(sol.coefficients(), 100) <= 1e-7);
  for (double t : linspace(0.0, 0.9 - 1e-3, 50)) {
    const double r = residual(sol.coefficients(), [&](double s) { return sol(s); }, t, 1e-3);
    CHECK(std::abs(r) <= 1e-6 * (1.0 + std::pow(sol(t), -2.0)));
  }

  // Large C1: f1 is negligible and the flat solution comes back.
  c.C1 = 1e8;
  c.T0 = 0.0;
  const auto near = corollary2_solution(parse("1"), -2, c, opts(0.5, 2.0));
  const auto flat = corollary1_solution(parse("0"), parse("1"), -2, {}, opts(0.5, 2.0));
  for (double t : {0.5, 1.0, 2.0}) CHECK(std::abs(near(t) - flat(t)) <= 1e-4);

  CHECK_THROWS_AS(corollary2_solution(parse("1"), -2, {}, opts(0.0, 1.0)), UsageError);
}

TEST_CASE("corollary 3") {
  SolutionConstants c;
  c.C2 = 1.0;
  c.f03 = 1.0;
  c.T0 = -0.5;
  const auto sol = corollary3_solution(parse("0"), -2, c, opts(0.0, 0.9 - 1e-3));
  const auto& f3 = sol.coefficients().f3();
  CHECK(f3(0.5) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(sol.coefficients().f2()(0.5) == 0.0);

  // Same equation written directly in corollary-1 form.
  const auto direct = corollary1_solution(parse("0"), parse("1/(1-t)"), -2, c, opts(0.0, 0.9 - 1e-3));
  for (double t : linspace(0.0, 0.9 - 1e-3, 20)) CHECK(std::abs(sol(t) - direct(t)) <= 1e-8);

  CHECK_THROWS_AS(corollary3_solution(parse("0"), -1, c, opts(0.0, 0.5)), UsageError);
}

TEST_CASE("corollary 3: independent transcription of the closed form") {
  // f1 = 1/10, n = -2, C2 = 2, f03 = 1.5, C = 1.2, T0 = -0.3, t_ref = 0:
  // E = exp(3 t / 10), D = C2 - (exp(0.3 t) - 1)/0.3, u = E/D, integral of u = -ln(D/C2).
  const double n = -2.0, C = 1.2, C2 = 2.0, f03 = 1.5, T0 = -0.3;
  const double s = 3.0 + n;
  auto D = [&](double t) { return C2 - (std::exp(0.3 * t) - 1.0) / 0.3; };
  auto int_u = [&](double t) { return -std::log(D(t) / C2); };
  auto inner = [&](double t) {
    return std::exp(2.0 / s * (int_u(t) + (1.0 - n) / 2.0 * 0.1 * t));
  };
  const double a = canonical_particular_amplitude(n);
  auto x = [&](double t) {
    const double bracket = std::pow(C, (1.0 - n) / 2.0) * std::pow(f03, 2.0 / s) *
                               simpson(inner, 0.0, t) -
                           T0;
    return (a / C) * std::pow(f03, -1.0 / s) * std::pow(bracket, 2.0 / (1.0 - n)) *
           std::exp(-1.0 / s * (int_u(t) + 2.0 * 0.1 * t));
  };
  SolutionConstants c;
  c.C = C;
  c.C2 = C2;
  c.f03 = f03;
  c.T0 = T0;
  const auto sol = corollary3_solution(parse("1/10"), n, c, opts(0.0, 1.5));
  for (double t : {0.0, 0.4, 1.0}) CHECK(std::abs(sol(t) - x(t)) <= 1e-9 * std::abs(x(t)));
  // D(1.5) is about 0.12, which amplifies quadrature error.
  CHECK(std::abs(sol(1.5) - x(1.5)) <= 1e-8 * std::abs(x(1.5)));
}

TEST_CASE("large-n approximation") {
  SolutionConstants c;
  c.C0 = 0.5;
  c.T0 = 0.2;
  const auto sol = large_n_approx(parse("0"), parse("1"), 50, c, opts(0.0, 2.0));
  for (double t : {0.0, 0.5, 2.0}) CHECK(sol(t) == doctest::Approx(t - 0.2));
  CHECK(std::abs(solution_derivative(sol, 1.0) - 1.0) <= 1e-10);
  CHECK(sol.valid_t().lo == 0.0);
  CHECK_THROWS_AS(large_n_approx(parse("0"), parse("1"), 50, {}, opts(0.0, 1.0)), UsageError);

  c.C = 2.0;
  c.eps = Branch::minus;
  const auto scaled = large_n_approx(parse("0.5"), parse("1"), 50, c, opts(0.0, 2.0));
  const auto& tr = scaled.transform();
  for (double t : {0.3, 1.1}) {
    CHECK(scaled(t) == doctest::Approx(-(tr.T(t) - 0.2) / 2.0 / std::exp(2.0 * 0.5 * t / 53.0)));
  }
}
