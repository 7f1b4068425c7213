#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nlsnorm
{

/// Exit codes of the command-line driver.
enum ExitCode : int
{
  exit_ok = 0,
  exit_solver_failure = 1,
  exit_config_error = 2,
};

/// Parses args (without the program name), runs the subcommand, prints the
/// primary result on out and diagnostics on err.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);
int run_cli(int argc, char **argv);

}  // namespace nlsnorm
