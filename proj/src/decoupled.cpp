#include "nlsnorm/decoupled.hpp"

namespace nlsnorm
{

DecoupledPair decoupled_pair(const SystemParams &pm, GridPtr grid, const GridPolicy &policy)
{
  pm.validate();
  const auto unit = RadialGrid::uniform(pm.dim);
  auto g1 = solve_unit_ground(ScalarProblem(pm.dim, pm.p1, pm.mu1), unit);
  if (pm.p1 == pm.p2 && pm.mu1 == pm.mu2)
  {
    return decoupled_pair(pm, g1, g1, std::move(grid), policy);
  }
  auto g2 = solve_unit_ground(ScalarProblem(pm.dim, pm.p2, pm.mu2), unit);
  return decoupled_pair(pm, g1, g2, std::move(grid), policy);
}

DecoupledPair decoupled_pair(const SystemParams &pm, const GroundState &g1, const GroundState &g2,
                             GridPtr grid, const GridPolicy &policy)
{
  const double l1 = rescaled_lambda(g1, pm.a1);
  const double l2 = rescaled_lambda(g2, pm.a2);
  if (!grid)
  {
    grid = grid_for_scales(pm.dim, l1, l2, policy);
  }
  auto u1 = rescale_to_mass(g1, pm.a1, grid).u;
  auto u2 = rescale_to_mass(g2, pm.a2, grid).u;
  return {g1,
          g2,
          l1,
          l2,
          ground_level(g1, pm.a1),
          ground_level(g2, pm.a2),
          State(std::move(u1), std::move(u2))};
}

}  // namespace nlsnorm
