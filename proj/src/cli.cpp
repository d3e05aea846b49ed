#include "anharmonic/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string_view>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "anharmonic/error.hpp"
#include "anharmonic/integrability.hpp"
#include "anharmonic/oracle.hpp"
#include "anharmonic/solutions.hpp"
#include "anharmonic/transform.hpp"

namespace anharmonic::cli {

namespace {

using nlohmann::json;

// --- logging ----------------------------------------------------------------

enum class LogLevel { quiet = 0, error, warn, info, debug };

LogLevel log_level() {
  const char* env = std::getenv("ANHARMONIC_LOG");
  if (env == nullptr) return LogLevel::warn;
  const std::string_view v(env);
  if (v == "quiet") return LogLevel::quiet;
  if (v == "error") return LogLevel::error;
  if (v == "info") return LogLevel::info;
  if (v == "debug") return LogLevel::debug;
  return LogLevel::warn;
}

void log(std::ostream& os, LogLevel level, const std::string& msg) {
  static constexpr const char* names[] = {"", "error", "warn", "info", "debug"};
  if (level <= log_level()) os << names[static_cast<int>(level)] << ": " << msg << '\n';
}

// --- tables -----------------------------------------------------------------

struct Table {
  std::vector<std::pair<std::string, json>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

json rounded(double v, int precision) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_real(v, precision));
}

std::string metadata_text(const json& v, int precision) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_real(v.get<double>(), precision);
  if (v.is_array()) {
    std::string s;
    for (const auto& item : v) {
      if (!s.empty()) s += ' ';
      s += metadata_text(item, precision);
    }
    return s;
  }
  return v.dump();
}

void write_table(const Table& table, const RunConfig& cfg, std::ostream& os) {
  if (cfg.format == "json") {
    json doc;
    json meta = json::object();
    for (const auto& [key, value] : table.metadata) {
      meta[key] = value.is_number_float() ? rounded(value.get<double>(), cfg.precision) : value;
    }
    doc["metadata"] = meta;
    doc["columns"] = table.columns;
    json rows = json::array();
    for (const auto& row : table.rows) {
      json r = json::array();
      for (double v : row) r.push_back(rounded(v, cfg.precision));
      rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    os << doc.dump(2) << '\n';
    return;
  }
  for (const auto& [key, value] : table.metadata) {
    os << "# " << key << '=' << metadata_text(value, cfg.precision) << "\r\n";
  }
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    os << (i ? "," : "") << table.columns[i];
  }
  os << "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? "," : "") << (std::isfinite(row[i]) ? format_real(row[i], cfg.precision) : "nan");
    }
    os << "\r\n";
  }
}

void emit(const Table& table, const RunConfig& cfg, std::ostream& out) {
  if (cfg.out_path.empty()) {
    write_table(table, cfg, out);
    return;
  }
  std::ofstream file(cfg.out_path, std::ios::binary);
  if (!file) throw UsageError("cannot open output file '" + cfg.out_path + "'");
  write_table(table, cfg, file);
}

// --- config helpers ---------------------------------------------------------

const std::string& require_flag(const std::optional<std::string>& v, const char* flag,
                                const char* context) {
  if (!v) throw UsageError(std::string(context) + " requires " + flag);
  return *v;
}

double require_value(const std::optional<double>& v, const char* flag, const char* context) {
  if (!v) throw UsageError(std::string(context) + " requires " + flag);
  return *v;
}

Interval domain_of(const RunConfig& cfg) {
  if (!(cfg.t_max > cfg.t_min)) throw UsageError("--t-max must exceed --t-min");
  return {cfg.t_min, cfg.t_max};
}

Branch branch_of(const RunConfig& cfg) {
  if (cfg.eps == 1) return Branch::plus;
  if (cfg.eps == -1) return Branch::minus;
  throw UsageError("--eps must be +1 or -1");
}

SolutionOptions solution_options(const RunConfig& cfg) {
  SolutionOptions o;
  o.domain = domain_of(cfg);
  o.t_ref = cfg.t_ref;
  o.tol = cfg.quad_tol;
  o.guard = cfg.guard;
  return o;
}

SolutionConstants solution_constants(const RunConfig& cfg) {
  SolutionConstants c;
  c.C = cfg.C;
  c.T0 = cfg.T0;
  c.eps = branch_of(cfg);
  c.C1 = cfg.C1;
  c.C2 = cfg.C2;
  c.f03 = cfg.f03;
  c.C0 = cfg.C0;
  return c;
}

json interval_json(const Interval& i) { return json::array({i.lo, i.hi}); }

ClosedFormSolution build_solution(const RunConfig& cfg) {
  const double n = require_value(cfg.n, "--n", "solve/verify");
  const Family family = parse_family(cfg.family);
  const SolutionConstants c = solution_constants(cfg);
  const SolutionOptions o = solution_options(cfg);
  switch (family) {
    case Family::corollary1:
      return corollary1_solution(parse(require_flag(cfg.f1, "--f1", "family c1")),
                                 parse(require_flag(cfg.f3, "--f3", "family c1")), n, c, o);
    case Family::corollary2:
      require_value(cfg.C1, "--C1", "family c2");
      return corollary2_solution(parse(require_flag(cfg.f3, "--f3", "family c2")), n, c, o);
    case Family::corollary3:
      require_value(cfg.C2, "--C2", "family c3");
      require_value(cfg.f03, "--f03", "family c3");
      return corollary3_solution(parse(require_flag(cfg.f1, "--f1", "family c3")), n, c, o);
    case Family::large_n:
      require_value(cfg.C0, "--C0", "family large-n");
      return large_n_approx(parse(require_flag(cfg.f1, "--f1", "family large-n")),
                            parse(require_flag(cfg.f3, "--f3", "family large-n")), n, c, o);
  }
  throw UsageError("unknown family");
}

void add_solution_metadata(Table& table, const ClosedFormSolution& sol) {
  const SolutionConstants& c = sol.constants();
  table.metadata.emplace_back("family", std::string(family_name(sol.family())));
  table.metadata.emplace_back("n", sol.n());
  table.metadata.emplace_back("C", c.C);
  table.metadata.emplace_back("T0", c.T0);
  table.metadata.emplace_back("eps", static_cast<int>(c.eps));
  table.metadata.emplace_back("t_ref", sol.t_ref());
  table.metadata.emplace_back("x0", c.x0);
  if (c.C1) table.metadata.emplace_back("C1", *c.C1);
  if (c.C2) table.metadata.emplace_back("C2", *c.C2);
  if (c.f03) table.metadata.emplace_back("f03", *c.f03);
  if (c.C0) table.metadata.emplace_back("C0", *c.C0);
  table.metadata.emplace_back("valid_t", interval_json(sol.valid_t()));
  table.metadata.emplace_back("poles", json(sol.poles().poles));
}

void report_poles(const PoleReport& poles, std::ostream& log_os) {
  for (double p : poles.poles) {
    log(log_os, LogLevel::warn, "denominator changes sign near t = " + format_real(p, 15) +
                                    "; usable domain truncated to [" +
                                    format_real(poles.usable.lo, 15) + ", " +
                                    format_real(poles.usable.hi, 15) + "]");
  }
}

DerivationOptions derivation_options(const RunConfig& cfg) {
  DerivationOptions d;
  d.t_ref = cfg.t_ref;
  d.domain = domain_of(cfg);
  d.tol = cfg.quad_tol;
  d.guard = cfg.guard;
  return d;
}

}  // namespace

// --- subcommands ------------------------------------------------------------

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& log_os) {
  const double n = require_value(cfg.n, "--n", "check");
  const CoefficientSet cs(parse(require_flag(cfg.f1, "--f1", "check")),
                          parse(require_flag(cfg.f2, "--f2", "check")),
                          parse(require_flag(cfg.f3, "--f3", "check")), n, domain_of(cfg));
  Table table;
  table.columns = {"t", "f2", "condition_rhs", "residual"};
  double worst = 0.0;
  for (double t : linspace(cfg.t_min, cfg.t_max, cfg.grid)) {
    const double rhs = condition_rhs(cs.f1(), cs.f3(), n, t);
    const double f2 = cs.f2()(t);
    worst = std::max(worst, std::abs(f2 - rhs));
    table.rows.push_back({t, f2, rhs, f2 - rhs});
  }
  const bool ok = worst <= cfg.resid_tol;
  table.metadata = {{"n", n},
                    {"max_residual", worst},
                    {"tolerance", cfg.resid_tol},
                    {"verdict", ok ? "integrable" : "not integrable"}};
  emit(table, cfg, out);
  log(log_os, LogLevel::info, "max |condition residual| = " + format_real(worst));
  return ok ? kExitOk : kExitFailed;
}

int cmd_derive(const RunConfig& cfg, std::ostream& out, std::ostream& log_os) {
  const double n = require_value(cfg.n, "--n", "derive");
  require_admissible_exponent(n);
  Table table;
  table.metadata.emplace_back("case", cfg.derive_case);
  table.metadata.emplace_back("n", n);
  switch (cfg.derive_case) {
    case 1: {
      const Expr f1 = parse(require_flag(cfg.f1, "--f1", "derive --case 1"));
      const Expr f3 = parse(require_flag(cfg.f3, "--f3", "derive --case 1"));
      const Coefficient f2 = derive_f2_case1(f1, f3, n);
      const CoefficientSet cs(f1, f2, f3, n, domain_of(cfg));
      table.metadata.emplace_back("f2_expr", f2.describe());
      table.metadata.emplace_back("valid_t", interval_json(cs.domain()));
      table.columns = {"t", "f1", "f2", "f3"};
      for (double t : linspace(cfg.t_min, cfg.t_max, cfg.grid)) {
        table.rows.push_back({t, f1(t), f2(t), f3(t)});
      }
      break;
    }
    case 2: {
      const Expr f3 = parse(require_flag(cfg.f3, "--f3", "derive --case 2"));
      const double C1 = require_value(cfg.C1, "--C1", "derive --case 2");
      const DerivedF1 d = derive_f1_case2(f3, n, C1, derivation_options(cfg));
      report_poles(d.poles, log_os);
      const Coefficient f2 = derive_f2_case2(f3, n);
      const CoefficientSet cs(d.f1, f2, f3, n, d.poles.usable);
      table.metadata.emplace_back("C1", C1);
      table.metadata.emplace_back("t_ref", cfg.t_ref);
      table.metadata.emplace_back("f2_expr", f2.describe());
      table.metadata.emplace_back("valid_t", interval_json(d.poles.usable));
      table.metadata.emplace_back("poles", json(d.poles.poles));
      table.columns = {"t", "f1", "f2", "f3"};
      for (double t : linspace(d.poles.usable.lo, d.poles.usable.hi, cfg.grid)) {
        table.rows.push_back({t, cs.f1()(t), f2(t), f3(t)});
      }
      break;
    }
    case 3: {
      const Expr f1 = parse(require_flag(cfg.f1, "--f1", "derive --case 3"));
      const double C2 = require_value(cfg.C2, "--C2", "derive --case 3");
      const double f03 = require_value(cfg.f03, "--f03", "derive --case 3");
      const DerivedF3 d = derive_f3_case3(f1, n, C2, f03, derivation_options(cfg));
      report_poles(d.poles, log_os);
      const Coefficient f2 = derive_f2_case3(f1, n);
      const CoefficientSet cs(f1, f2, d.f3, n, d.poles.usable);
      table.metadata.emplace_back("C2", C2);
      table.metadata.emplace_back("f03", f03);
      table.metadata.emplace_back("t_ref", cfg.t_ref);
      table.metadata.emplace_back("f2_expr", f2.describe());
      table.metadata.emplace_back("valid_t", interval_json(d.poles.usable));
      table.metadata.emplace_back("poles", json(d.poles.poles));
      table.columns = {"t", "f1", "f2", "f3", "u"};
      for (double t : linspace(d.poles.usable.lo, d.poles.usable.hi, cfg.grid)) {
        table.rows.push_back({t, f1(t), f2(t), cs.f3()(t), d.u(t)});
      }
      break;
    }
    default:
      throw UsageError("derive requires --case 1, 2 or 3");
  }
  emit(table, cfg, out);
  return kExitOk;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& log_os) {
  const ClosedFormSolution sol = build_solution(cfg);
  report_poles(sol.poles(), log_os);
  Table table;
  add_solution_metadata(table, sol);
  table.columns = {"t", "x", "dxdt"};
  for (double t : linspace(sol.valid_t().lo, sol.valid_t().hi, cfg.grid)) {
    table.rows.push_back({t, sol(t), solution_derivative(sol, t)});
  }
  emit(table, cfg, out);
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& log_os) {
  ClosedFormSolution sol = build_solution(cfg);
  report_poles(sol.poles(), log_os);
  if (cfg.x0_scale != 1.0) sol = sol.with_x0(sol.constants().x0 * cfg.x0_scale);
  if (cfg.check_n) sol = sol.with_coefficients(sol.coefficients().with_exponent(*cfg.check_n));

  VerifyTolerances tol;
  tol.rtol = cfg.rtol;
  tol.atol = cfg.atol;
  tol.residual = cfg.resid_tol;
  tol.deviation = cfg.deviation_tol;
  tol.energy = cfg.energy_tol;
  const VerificationReport rep = verify(sol, cfg.grid, tol);

  Table table;
  add_solution_metadata(table, sol);
  table.metadata.emplace_back("max_residual", rep.max_residual);
  table.metadata.emplace_back("max_rel_deviation_vs_oracle", rep.max_rel_deviation_vs_oracle);
  table.metadata.emplace_back("energy_drift", rep.energy_drift);
  table.metadata.emplace_back("residual_tol", tol.residual);
  table.metadata.emplace_back("deviation_tol", tol.deviation);
  table.metadata.emplace_back("energy_tol", tol.energy);
  if (!rep.oracle_failure.empty()) table.metadata.emplace_back("oracle_failure", rep.oracle_failure);
  table.metadata.emplace_back("pass", rep.pass);
  table.columns = {"t", "x_closed", "x_oracle", "residual", "rel_deviation", "energy"};
  for (std::size_t i = 0; i < rep.grid.size(); ++i) {
    table.rows.push_back({rep.grid[i], rep.x_closed[i], rep.x_oracle[i], rep.residuals[i],
                          rep.deviations[i], rep.energies[i]});
  }
  emit(table, cfg, out);
  log(log_os, rep.pass ? LogLevel::info : LogLevel::warn,
      std::string("verification ") + (rep.pass ? "passed" : "FAILED") +
          ": residual=" + format_real(rep.max_residual, 4) +
          " deviation=" + format_real(rep.max_rel_deviation_vs_oracle, 4) +
          " energy_drift=" + format_real(rep.energy_drift, 4));
  return rep.pass ? kExitOk : kExitFailed;
}

int cmd_transform(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const double n = require_value(cfg.n, "--n", "transform");
  const Expr f1 = parse(require_flag(cfg.f1, "--f1", "transform"));
  const Expr f3 = parse(require_flag(cfg.f3, "--f3", "transform"));
  const Coefficient f2 = cfg.f2 ? Coefficient(parse(*cfg.f2)) : derive_f2_case1(f1, f3, n);
  const Interval domain = domain_of(cfg);
  const CoefficientSet cs(f1, f2, f3, n, domain);
  TransformParams p;
  p.C = cfg.C;
  p.t_ref = cfg.t_ref;
  p.n = n;
  p.tol = cfg.quad_tol;
  const PointTransform tr(cs, p);
  const std::optional<Expr> x = cfg.x_expr ? std::optional<Expr>(parse(*cfg.x_expr)) : std::nullopt;

  Table table;
  table.metadata = {{"n", n}, {"C", cfg.C}, {"t_ref", cfg.t_ref}};
  if (!cfg.invert) {
    table.columns = {"t", "T"};
    if (x) table.columns.push_back("X");
    for (double t : linspace(domain.lo, domain.hi, cfg.grid)) {
      std::vector<double> row{t, tr.T(t)};
      if (x) row.push_back(tr.X((*x)(t), t));
      table.rows.push_back(std::move(row));
    }
  } else {
    const double T_lo = cfg.T_min.value_or(tr.T(domain.lo));
    const double T_hi = cfg.T_max.value_or(tr.T(domain.hi));
    table.columns = {"T", "t"};
    for (double T : linspace(T_lo, T_hi, cfg.grid)) {
      table.rows.push_back({T, tr.invert_T(T, domain)});
    }
  }
  emit(table, cfg, out);
  return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Exact solutions of x'' + f1 x' + f2 x + f3 x^n = 0: integrability checks, "
               "coefficient derivation, closed-form solutions and numerical verification",
               "anharmonic"};
  app.set_config("--config", "", "Read key=value options from a file (flags override)");
  app.require_subcommand(1);

  app.add_option("--f1", cfg.f1, "Damping coefficient f1(t)");
  app.add_option("--f2", cfg.f2, "Linear coefficient f2(t)");
  app.add_option("--f3", cfg.f3, "Anharmonic coefficient f3(t) (> 0)");
  app.add_option("--n", cfg.n, "Anharmonicity exponent (not -3, -1, 0, 1)")
      ->check([](const std::string& s) -> std::string {
        try {
          if (is_excluded_exponent(std::stod(s))) {
            return "n = " + s + " is excluded (n must avoid -3, -1, 0, 1)";
          }
        } catch (const std::exception&) {
          return "n must be a real number";
        }
        return {};
      });
  app.add_option("--C", cfg.C, "Transformation constant C (> 0)")->capture_default_str();
  app.add_option("--T0", cfg.T0, "Canonical time offset T0")->capture_default_str();
  app.add_option("--C1", cfg.C1, "Case-2 Bernoulli constant");
  app.add_option("--C2", cfg.C2, "Case-3 Bernoulli constant");
  app.add_option("--f03", cfg.f03, "Case-3 amplitude of f3 (> 0)");
  app.add_option("--C0", cfg.C0, "Canonical energy for the large-n approximation");
  app.add_option("--eps", cfg.eps, "Branch sign, +1 or -1")->capture_default_str();
  app.add_option("--t-ref", cfg.t_ref, "Base point of all nested integrals")->capture_default_str();
  app.add_option("--t-min", cfg.t_min, "Domain start")->capture_default_str();
  app.add_option("--t-max", cfg.t_max, "Domain end")->capture_default_str();
  app.add_option("--grid", cfg.grid, "Grid points")->capture_default_str()->check(
      CLI::Range(2, 10'000'000));
  app.add_option("--rtol", cfg.rtol, "Oracle relative tolerance")->capture_default_str();
  app.add_option("--atol", cfg.atol, "Oracle absolute tolerance")->capture_default_str();
  app.add_option("--resid-tol", cfg.resid_tol, "Residual pass threshold")->capture_default_str();
  app.add_option("--dev-tol", cfg.deviation_tol, "Oracle deviation pass threshold")
      ->capture_default_str();
  app.add_option("--energy-tol", cfg.energy_tol, "Energy drift pass threshold")
      ->capture_default_str();
  app.add_option("--quad-tol", cfg.quad_tol, "Quadrature relative tolerance")
      ->capture_default_str();
  app.add_option("--guard", cfg.guard, "Exclusion radius around singular points")
      ->capture_default_str();
  app.add_option("--format", cfg.format, "Output format")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", cfg.out_path, "Output file (default stdout)");
  app.add_option("--precision", cfg.precision, "Significant digits")
      ->capture_default_str()
      ->check(CLI::Range(1, 17));

  auto* check = app.add_subcommand("check", "Evaluate the integrability condition on a grid");
  auto* derive = app.add_subcommand("derive", "Derive coefficients for case 1, 2 or 3");
  derive->add_option("--case", cfg.derive_case, "Derivation case")
      ->required()
      ->check(CLI::IsMember({1, 2, 3}));
  auto* solve = app.add_subcommand("solve", "Tabulate a closed-form solution");
  solve->add_option("--family", cfg.family, "c1, c2, c3 or large-n")
      ->required()
      ->check(CLI::IsMember({"c1", "c2", "c3", "large-n"}));
  auto* verify_cmd = app.add_subcommand("verify", "Verify a closed-form solution numerically");
  verify_cmd->add_option("--family", cfg.family, "c1, c2, c3 or large-n")
      ->required()
      ->check(CLI::IsMember({"c1", "c2", "c3", "large-n"}));
  verify_cmd->add_option("--x0-scale", cfg.x0_scale, "Multiply x0 (negative control)");
  verify_cmd->add_option("--check-n", cfg.check_n, "Verify against a different exponent");
  auto* transform = app.add_subcommand("transform", "Tabulate the point transformation");
  transform->add_flag("--invert", cfg.invert, "Map a T grid back to t");
  transform->add_option("--x", cfg.x_expr, "x(t) to push forward to X");
  transform->add_option("--T-min", cfg.T_min, "Inverse grid start (default T(t_min))");
  transform->add_option("--T-max", cfg.T_max, "Inverse grid end (default T(t_max))");
  for (auto* sub : {check, derive, solve, verify_cmd, transform}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*check) return cmd_check(cfg, out, err);
    if (*derive) return cmd_derive(cfg, out, err);
    if (*solve) return cmd_solve(cfg, out, err);
    if (*verify_cmd) return cmd_verify(cfg, out, err);
    if (*transform) return cmd_transform(cfg, out, err);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}

}  // namespace anharmonic::cli
