#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlsnorm/energy.hpp"

namespace nlsnorm
{

struct GridSpec
{
  std::size_t nodes = RadialGrid::default_nodes;
  double r_max = RadialGrid::default_r_max;

  bool operator==(const GridSpec &) const = default;
};

/// One CLI invocation. Sections that a subcommand does not use keep their
/// defaults and still round-trip.
struct RunConfig
{
  std::string subcommand;
  SystemParams params;

  // ground, level-curve
  int scalar_dim = 3;
  double scalar_p = 3.0;
  double scalar_mu = 1.0;
  std::vector<double> masses{0.5, 1.0, 2.0, 4.0};

  /// Unset: solvers size their grids from the decay scales.
  std::optional<GridSpec> grid;

  double tol = 1e-8;
  int max_iters = 20000;
  int restarts = 3;
  std::uint64_t seed = 1;
  int jobs = 1;

  // sweep
  std::vector<double> sweep_a1{1.0};
  std::vector<double> sweep_a2{1.0};
  std::vector<double> sweep_beta{0.05, 1.0};

  // fiber
  double fiber_s_min = -2.0;
  double fiber_s_max = 2.0;
  int fiber_steps = 41;

  // check
  bool check_full = false;

  std::string out;

  bool operator==(const RunConfig &) const = default;

  /// Parameter and option checks; throws ConfigError.
  void validate() const;
};

/// Reads a TOML document. Unknown keys are errors. Throws ConfigError.
RunConfig parse_config(const std::string &toml_text, RunConfig base = {});
RunConfig load_config(const std::string &path, RunConfig base = {});

/// Only the [params] table (or bare top-level parameter keys) of a file.
SystemParams load_params(const std::string &path, SystemParams base = {});

/// Effective configuration as TOML, doubles in 17 digits; parse_config of
/// the result gives back an equal RunConfig.
std::string to_toml(const RunConfig &cfg);

/// "M,rmax" or "uniform(M),rmax".
GridSpec parse_grid_flag(const std::string &text);
/// Comma-separated numbers.
std::vector<double> parse_list(const std::string &text);

}  // namespace nlsnorm
