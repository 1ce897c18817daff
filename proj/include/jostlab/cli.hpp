#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jostlab/regular.hpp"

namespace jostlab {

struct LambdaGrid {
  double min = 0.1;
  double max = 10.0;
  std::size_t n = 50;
  bool log_spacing = false;

  std::vector<double> values() const;
};

struct XGrid {
  double min = 0.0;
  double max = 20.0;
  std::size_t n = 201;

  std::vector<double> values() const { return linspace(min, max, n); }
};

enum class OutputFormat { Csv, Json };

/// Everything a CLI run needs, read from the config file and then overridden
/// by command-line flags.
struct RunConfig {
  CoefficientModel model = free_model();
  LambdaGrid lambda;
  std::vector<SpectralPoint> z;
  XGrid x;
  BoundaryCondition bc;
  Tolerances tol;
  std::optional<std::pair<double, double>> eigen_bracket;
  std::string out_path;
  /// Unset means the command's default: JSON for eigen, CSV otherwise.
  std::optional<OutputFormat> format;

  void validate() const;
};

OutputFormat parse_output_format(const std::string& text);
/// "dirichlet" or "robin:<h>".
BoundaryCondition parse_boundary_condition(const std::string& text);
RunConfig load_run_config(const std::string& path);

/// Column-oriented result table written as CSV (17 significant digits) or as a
/// JSON array of row objects.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void write(std::ostream& os, OutputFormat format) const;
};

Table cmd_jost(const RunConfig& cfg);
Table cmd_scatter(const RunConfig& cfg);
Table cmd_eigen(const RunConfig& cfg);

struct VerifyCheck {
  std::string name;
  double parameter = 0.0;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct VerifyReport {
  bool assumptions_ok = true;
  std::vector<std::string> messages;
  std::vector<VerifyCheck> checks;

  bool passed() const;
};

VerifyReport cmd_verify(const RunConfig& cfg);

/// Exit codes of the command-line tool.
enum ExitCode { kExitOk = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitSolver = 3, kExitAssumption = 4 };

int exit_code_for(ErrorKind kind);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jostlab
