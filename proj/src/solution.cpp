#include "nlsnorm/solution.hpp"

#include <algorithm>

namespace nlsnorm
{

Solution evaluate_solution(const SystemParams &pm, State state)
{
  const auto lam = lagrange_multipliers(pm, state);
  return evaluate_solution(pm, std::move(state), lam.lambda1, lam.lambda2);
}

Solution evaluate_solution(const SystemParams &pm, State state, double lambda1, double lambda2)
{
  const auto n = compute_norms(pm, state);
  const double res = residual_norm(gradient_residual(pm, state, lambda1, lambda2));
  Solution s{std::move(state), lambda1, lambda2, 0.0, 0.0, 0.0, 0, classify_regime(pm), false, "", "", {}};
  s.J_value = energy_J(pm, n);
  s.Q_value = pohozaev_Q(pm, n);
  s.residual_norm = res;
  return s;
}

double interior_min(const State &st)
{
  double m = st.u1[0];
  for (std::size_t i = 0; i + 1 < st.u1.size(); ++i)
  {
    m = std::min({m, st.u1[i], st.u2[i]});
  }
  return m;
}

}  // namespace nlsnorm
