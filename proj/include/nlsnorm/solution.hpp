#pragma once

#include <string>
#include <vector>

#include "nlsnorm/energy.hpp"

namespace nlsnorm
{

/// Result of a solver run. lambda_i follow the -Δu_i = λ_i u_i + ... convention.
struct Solution
{
  State state;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double J_value = 0.0;
  double Q_value = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  Regime regime{RegimeTag::Unclassified, false, ""};
  bool converged = false;
  std::string method;
  std::string note;
  /// Per-iteration trace: J for the flow, residual norm for Newton.
  std::vector<double> history;
};

/// Fills λ (from the multipliers of the state), J, Q and the residual.
Solution evaluate_solution(const SystemParams &params, State state);

/// Same with prescribed multipliers.
Solution evaluate_solution(const SystemParams &params, State state, double lambda1,
                           double lambda2);

/// Smallest value of u1, u2 over the nodes before r_max.
double interior_min(const State &state);

}  // namespace nlsnorm
