#pragma once

#include <iosfwd>
#include <optional>
#include <string>

namespace anharmonic::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;  // not integrable / verification failed / pole-only domain
inline constexpr int kExitUsage = 2;   // bad flags, unparsable expression, domain error

struct RunConfig {
  std::string subcommand;
  std::optional<std::string> f1;
  std::optional<std::string> f2;
  std::optional<std::string> f3;
  std::optional<double> n;
  double C = 1.0;
  double T0 = 0.0;
  std::optional<double> C1;
  std::optional<double> C2;
  std::optional<double> f03;
  std::optional<double> C0;
  int eps = 1;
  double t_ref = 0.0;
  double t_min = 0.0;
  double t_max = 1.0;
  int grid = 200;
  double rtol = 1e-10;
  double atol = 1e-12;
  double resid_tol = 1e-6;
  double deviation_tol = 1e-6;
  double energy_tol = 1e-8;
  double quad_tol = 1e-10;
  double guard = 1e-3;
  std::string format = "csv";
  std::string out_path;
  int precision = 12;

  int derive_case = 0;         // derive
  std::string family;          // solve / verify
  double x0_scale = 1.0;       // verify: negative control
  std::optional<double> check_n;  // verify against a different exponent
  bool invert = false;         // transform
  std::optional<std::string> x_expr;
  std::optional<double> T_min;
  std::optional<double> T_max;
};

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_derive(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_transform(const RunConfig& cfg, std::ostream& out, std::ostream& log);

/// Parses argv, dispatches, and maps errors onto the exit-code contract.
/// Table output goes to `out` (or --out), diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace anharmonic::cli
