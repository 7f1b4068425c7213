#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlsnorm/decoupled.hpp"
#include "nlsnorm/solution.hpp"

namespace nlsnorm
{

struct FlowOptions
{
  double dt = 1.0;          // initial step
  double backtrack = 0.5;   // step factor after a rejected step
  double grow = 1.5;        // step factor after an accepted step
  double dt_min = 1e-12;
  double dt_max = 1.0;      // above ~1.5 the sawtooth mode of the five-point stencil grows
  int max_iters = 20000;
  double tol = 1e-8;        // weighted L² norm of the projected gradient
  int restarts = 3;         // perturbed copies of the ground pair
  double perturbation = 0.3;
  std::uint64_t seed = 1;
  std::vector<std::string> recipes = {"ground-pair", "gaussian-pair", "perturbed"};
  GridPtr grid;             // nullptr: chosen from the decoupled scales
  GridPolicy policy;
  /// Component held fixed (-1: none); the other is minimized on its sphere.
  int frozen = -1;

  void validate() const;
};

/// u √(a / |u|²). Throws NumericError for a zero field.
RadialField project_sphere(const RadialField &u, double a);

/// Preconditioned projected gradient flow on S(a1) × S(a2).
Solution descend(const SystemParams &params, const State &init, const FlowOptions &opts = {});

struct MultiStart
{
  Solution best;
  std::vector<Solution> runs;
  std::vector<std::string> labels;
};

/// Initial states named by recipe, on grid of the decoupled pair.
std::vector<std::pair<std::string, State>> initial_states(const SystemParams &params,
                                                          const DecoupledPair &pair,
                                                          const FlowOptions &opts);

/// Multi-start descend; best is the lowest-J converged run (or the lowest-J
/// run, unconverged, when none converged).
MultiStart global_min_estimate(const SystemParams &params, const FlowOptions &opts = {});
MultiStart global_min_estimate(const SystemParams &params, const DecoupledPair &pair,
                               const FlowOptions &opts);

}  // namespace nlsnorm
