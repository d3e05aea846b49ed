// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "anharmonic/cli.hpp"
#include "anharmonic/error.hpp"
#include "anharmonic/integrability.hpp"
#include "anharmonic/oracle.hpp"
#include "anharmonic/solutions.hpp"
#include "anharmonic/transform.hpp"

using namespace anharmonic;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void run_criterion(int id, const char* title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s | %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(),
              secs);
  std::fflush(stdout);
}

std::string fmt(double v) { return format_real(v, 3); }

SolutionOptions opts(double lo, double hi) {
  SolutionOptions o;
  o.domain = {lo, hi};
  return o;
}

// Random smooth coefficients: f1 = a + b sin(c t), f3 = exp(d t) (2 + cos(e t)).
struct RandomCoefficients {
  Expr f1;
  Expr f3;
};

RandomCoefficients random_coefficients(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto k = [&](double scale) { return Expr::constant(std::round(scale * u(rng) * 1000.0) / 1000.0); };
  const Expr t = Expr::variable();
  return {k(1.0) + k(1.0) * sin(k(2.0) * t), exp(k(0.5) * t) * (Expr::constant(2.0) + cos(k(2.0) * t))};
}

// Richardson five-point derivative with a step kept well inside the pole-free region.
double derivative_near(const RealFn& f, double t, double dist) {
  return richardson_diff1(f, t, std::min(1e-3, dist / 100.0));
}

Outcome criterion1() {
  std::mt19937_64 rng(101);
  const double ns[] = {-2.0, -2.5, -5.0, 2.0, 3.0, 1.5};
  double worst = 0.0;
  int sets = 0;
  for (int i = 0; i < 24; ++i) {
    const auto rc = random_coefficients(rng);
    const double n = ns[i % 6];
    const CoefficientSet cs(rc.f1, derive_f2_case1(rc.f1, rc.f3, n), rc.f3, n, {0.0, 3.0});
    worst = std::max(worst, max_condition_residual(cs, 100));
    ++sets;
  }
  return {worst <= 1e-7, std::to_string(sets) + " sets, max |residual| = " + fmt(worst)};
}

Outcome criterion2() {
  struct Case {
    const char* f1;
    const char* f3;
    double n;
    double x0, v0;
  };
  const Case cases[] = {{"0.2", "exp(t/10)", 2.0, 1.0, 0.0},
                        {"0.1*sin(t)", "1+t^2/4", 3.0, 0.8, 0.3},
                        {"0", "2+cos(t)", -2.0, 1.0, 1.0},
                        {"t/10", "1", -2.5, 1.2, 0.5},
                        {"0.3", "exp(-t/5)", 1.5, 0.9, -0.2}};
  double worst = 0.0;
  for (const auto& c : cases) {
    const Expr f1 = parse(c.f1), f3 = parse(c.f3);
    const CoefficientSet cs(f1, derive_f2_case1(f1, f3, c.n), f3, c.n, {0.0, 1.0});
    TransformParams p;
    p.n = c.n;
    const PointTransform tr(cs, p);
    const auto traj = integrate_ivp(make_problem(cs, 0.0, c.x0, c.v0), 1.0, 1e-12, 1e-14);
    auto X_of_T = [&](double T) {
      const double t = tr.invert_T(T, {0.0, 1.0});
      return tr.X(traj.at(t).x, t);
    };
    const double hT = 1e-2;
    const double T_lo = tr.T(0.0), T_hi = tr.T(1.0);
    for (double T : linspace(T_lo + 3 * hT, T_hi - 3 * hT, 40)) {
      const double X = X_of_T(T);
      const double Xtt = richardson_diff2(X_of_T, T, hT);
      worst = std::max(worst, std::abs(Xtt + real_pow(X, c.n)));
    }
  }
  return {worst <= 1e-5, "5 sets, max |X_TT + X^n| = " + fmt(worst)};
}

Outcome criterion3() {
  const char* f1s[] = {"0.1", "0.2*sin(t)", "t/10"};
  const char* f3s[] = {"exp(t/10)", "1+t^2", "2+cos(t)"};
  const double ns[] = {-2.0, -2.5, -5.0};
  double worst_res = 0.0, worst_dev = 0.0;
  bool all = true;
  for (double n : ns) {
    for (int i = 0; i < 3; ++i) {
      SolutionConstants c;
      c.C = 1.0 + 0.25 * i;
      c.T0 = -0.2;
      const auto sol = corollary1_solution(parse(f1s[i]), parse(f3s[i]), n, c, opts(0.0, 3.0));
      const auto rep = verify(sol, 100);
      all = all && rep.pass;
      worst_res = std::max(worst_res, rep.max_residual);
      worst_dev = std::max(worst_dev, rep.max_rel_deviation_vs_oracle);
    }
  }
  const auto flat = corollary1_solution(parse("0"), parse("1"), -2, {}, opts(0.0, 10.0));
  double flat_err = 0.0;
  for (double t : linspace(0.01, 10.0, 100)) {
    const double exact = std::cbrt(4.5) * std::pow(t, 2.0 / 3.0);
    flat_err = std::max(flat_err, std::abs(flat(t) - exact));
  }
  return {all && worst_res <= 1e-6 && worst_dev <= 1e-6 && flat_err <= 1e-9,
          "9 verifies, max residual = " + fmt(worst_res) + ", max deviation = " + fmt(worst_dev) +
              ", flat error = " + fmt(flat_err)};
}

Outcome criterion4() {
  const double n = -2.0;
  double worst_bern = 0.0, worst_res = 0.0, worst_dev = 0.0;
  bool all = true;
  for (const char* f3 : {"1", "exp(t/10)", "1+t^2"}) {
    SolutionConstants c;
    c.C1 = 1.0;
    c.T0 = -0.3;
    const auto sol = corollary2_solution(parse(f3), n, c, opts(0.0, 2.0));
    const auto& cs = sol.coefficients();
    const RealFn f1 = cs.f1().as_function();
    // Bernoulli form: f1' = b f1 + c f1^2 with b = (1-n)/(2(3+n)) f3'/f3, c = -(1+n)/(3+n).
    const Expr f3e = parse(f3);
    const Expr d3 = differentiate(f3e);
    const double s = 3.0 + n;
    for (double t : linspace(sol.valid_t().lo, sol.valid_t().hi, 100)) {
      const double dist = sol.singularity_distance(t);
      const double y = f1(t);
      const double lhs = derivative_near(f1, t, dist);
      const double rhs = (1.0 - n) / (2.0 * s) * d3(t) / f3e(t) * y - (1.0 + n) / s * y * y;
      worst_bern = std::max(worst_bern, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
    }
    const auto rep = verify(sol, 100);
    all = all && rep.pass && sol.poles().truncated();
    worst_res = std::max(worst_res, rep.max_residual);
    worst_dev = std::max(worst_dev, rep.max_rel_deviation_vs_oracle);
  }
  return {all && worst_bern <= 1e-8,
          "Bernoulli defect = " + fmt(worst_bern) + ", max residual = " + fmt(worst_res) +
              ", max deviation = " + fmt(worst_dev)};
}

Outcome criterion5() {
  const double n = -2.0;
  double worst_bern = 0.0, worst_log = 0.0, worst_res = 0.0, worst_dev = 0.0;
  bool all = true;
  for (const char* f1s : {"0", "1/10", "t/20"}) {
    DerivationOptions d;
    d.domain = {0.0, 2.0};
    const auto derived = derive_f3_case3(parse(f1s), n, 1.0, 1.0, d);
    const RealFn u = derived.u.as_function();
    const RealFn f3 = derived.f3.as_function();
    const Expr f1 = parse(f1s);
    const double s = 3.0 + n;
    SolutionConstants c;
    c.C2 = 1.0;
    c.f03 = 1.0;
    c.T0 = -0.3;
    const auto sol = corollary3_solution(f1, n, c, opts(0.0, 2.0));
    for (double t : linspace(sol.valid_t().lo, sol.valid_t().hi, 100)) {
      const double dist = sol.singularity_distance(t);
      const double y = u(t);
      const double rhs = (1.0 - n) / s * f1(t) * y + y * y / s;
      const double du = derivative_near(u, t, dist);
      worst_bern = std::max(worst_bern, std::abs(du - rhs) / (1.0 + std::abs(rhs)));
      const double log_slope = derivative_near(f3, t, dist) / f3(t);
      worst_log = std::max(worst_log, std::abs(log_slope - y) / (1.0 + std::abs(y)));
    }
    const auto rep = verify(sol, 100);
    all = all && rep.pass && sol.poles().truncated();
    worst_res = std::max(worst_res, rep.max_residual);
    worst_dev = std::max(worst_dev, rep.max_rel_deviation_vs_oracle);
  }
  return {all && worst_bern <= 1e-8 && worst_log <= 1e-8,
          "Bernoulli defect = " + fmt(worst_bern) + ", |u - f3'/f3| = " + fmt(worst_log) +
              ", max residual = " + fmt(worst_res) + ", max deviation = " + fmt(worst_dev)};
}

Outcome criterion6() {
  struct Case {
    double n, X0, V0;
  };
  double worst = 0.0;
  for (const Case& c : {Case{3.0, 1.0, 0.0}, Case{-2.0, 1.0, 2.0}}) {
    const auto traj = integrate_ivp(canonical_problem(c.n, 0.0, c.X0, c.V0), 10.0);
    const double E0 = canonical_energy({c.X0, c.V0, 0.0}, c.n);
    for (double T : linspace(0.0, 10.0, 2001)) {
      const auto s = traj.at(T);
      worst = std::max(worst, std::abs(canonical_energy({s.x, s.v, T}, c.n) - E0) / std::abs(E0));
    }
  }
  return {worst <= 1e-8, "max relative drift = " + fmt(worst)};
}

Outcome criterion7() {
  const double n = 50.0;
  SolutionConstants c;
  c.C0 = 0.5;
  const auto approx = large_n_approx(parse("0"), parse("1"), n, c, opts(0.0, 3.0));
  const auto traj = integrate_ivp(canonical_problem(n, 0.0, 0.0, 1.0), 3.0);
  double small_dev = 0.0;
  double late_dev = 0.0;
  double cross = -1.0;
  for (double T : linspace(0.0, 3.0, 3001)) {
    const double X = traj.at(T).x;
    if (T == 0.0) continue;
    const double dev = std::abs(approx(T) - X) / std::abs(X);
    if (cross < 0.0 && std::abs(X) <= 0.5) small_dev = std::max(small_dev, dev);
    if (cross < 0.0 && std::abs(X) > 1.0) cross = T;
    if (cross >= 0.0) late_dev = std::max(late_dev, dev);
  }
  return {small_dev <= 0.05 && cross > 0.0 && late_dev > 0.05,
          "deviation while |X| <= 0.5: " + fmt(small_dev) + ", |X| > 1 from T = " + fmt(cross) +
              ", deviation after: " + fmt(late_dev)};
}

Outcome criterion8() {
  bool all = true;
  std::string codes;
  for (const char* n : {"-3", "-1", "0", "1"}) {
    const char* argv[] = {"anharmonic", "solve", "--family", "c1", "--f1", "0", "--f3", "1", "--n", n};
    std::ostringstream out, err;
    const int code = cli::run(10, argv, out, err);
    bool threw = false;
    try {
      CoefficientSet(Coefficient(0.0), Coefficient(0.0), Coefficient(1.0), std::stod(n), {0.0, 1.0});
    } catch (const UsageError&) {
      threw = true;
    }
    all = all && code == cli::kExitUsage && threw;
    codes += std::string(codes.empty() ? "" : " ") + "n=" + n + ":" + std::to_string(code);
  }
  return {all, "exit codes " + codes};
}

Outcome criterion9() {
  bool all = true;
  double min_bad = 1e300;
  for (double n : {-2.0, -2.5, -5.0}) {
    SolutionConstants c;
    c.T0 = -0.2;
    const auto sol = corollary1_solution(parse("0.1"), parse("exp(t/10)"), n, c, opts(0.0, 3.0));
    const auto good = verify(sol, 100);
    const auto x0 = verify(sol.with_x0(sol.constants().x0 * 1.01), 100);
    const auto wrong_n = verify(sol.with_coefficients(sol.coefficients().with_exponent(n + 0.1)), 100);
    all = all && good.pass && !x0.pass && !wrong_n.pass;
    min_bad = std::min({min_bad, x0.max_residual, wrong_n.max_residual});
  }
  return {all, "baseline passes, corrupted runs fail; smallest corrupted residual = " + fmt(min_bad)};
}

Outcome criterion10() {
  struct Case {
    const char* f1;
    const char* f3;
    double n, C, t_ref;
  };
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> td(0.0, 5.0);
  double worst = 0.0;
  for (const Case& c : {Case{"0", "1", 2.0, 1.0, 0.0}, Case{"1", "1", 2.0, 1.0, 0.0},
                        Case{"0.3*sin(t)", "2+cos(t)", -2.5, 1.7, 1.0}}) {
    const Expr f1 = parse(c.f1), f3 = parse(c.f3);
    const CoefficientSet cs(f1, derive_f2_case1(f1, f3, c.n), f3, c.n, {0.0, 5.0});
    TransformParams p;
    p.C = c.C;
    p.n = c.n;
    p.t_ref = c.t_ref;
    for (int i = 0; i < 100; ++i) {
      const double t = td(rng);
      worst = std::max(worst, std::abs(invert_T(cs, p, forward_T(cs, p, t), {0.0, 5.0}) - t));
    }
  }
  return {worst <= 1e-9, "3 sets x 100 points, max |t - inv(T(t))| = " + fmt(worst)};
}

}  // namespace

int main() {
  run_criterion(1, "case-1 f2 satisfies the integrability condition", criterion1);
  run_criterion(2, "integrated x(t) maps to a solution of X'' + X^n = 0", criterion2);
  run_criterion(3, "corollary 1 verifies for n in {-2,-2.5,-5}", criterion3);
  run_criterion(4, "corollary 2: Bernoulli f1 and verification", criterion4);
  run_criterion(5, "corollary 3: Bernoulli u, u = f3'/f3 and verification", criterion5);
  run_criterion(6, "RK energy drift over T-spans of 10", criterion6);
  run_criterion(7, "large-n approximation accuracy window", criterion7);
  run_criterion(8, "excluded exponents are usage errors", criterion8);
  run_criterion(9, "negative controls fail verification", criterion9);
  run_criterion(10, "inverse T round trip", criterion10);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
