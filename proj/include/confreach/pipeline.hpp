#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace confreach {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 1,
  kExitSolverNonOptimal = 2,
  kExitValidationFailure = 3,
};

struct CommandOptions {
  std::string config_path;
  std::optional<std::string> out_dir;  // overrides output_dir from the config
  std::optional<int> degree;
  std::optional<std::vector<double>> alphas;
};

/// Assemble, solve, extract. Artifacts: problem.dat-s, solution_summary, w_poly,
/// v_poly, confidence_field.csv and one alpha_set_<alpha>.csv per alpha.
int cmd_solve(const CommandOptions& opts, std::ostream& log);

/// Monte Carlo check of the alpha sets written by cmd_solve. Artifacts:
/// empirical_field.csv, containment_report.
int cmd_validate(const CommandOptions& opts, std::ostream& log);

/// Writes problem.dat-s only.
int cmd_export(const CommandOptions& opts, std::ostream& log);

/// "alpha_set_0.2.csv" for alpha = 0.2.
std::string alpha_file_name(double alpha);

}  // namespace confreach
