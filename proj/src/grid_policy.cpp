#include "nlsnorm/grid_policy.hpp"

#include <algorithm>
#include <cmath>

#include "nlsnorm/errors.hpp"

namespace nlsnorm
{

GridPtr grid_for_scales(int dim, double lambda_min, double lambda_max, const GridPolicy &policy)
{
  lambda_min = std::abs(lambda_min);
  lambda_max = std::abs(lambda_max);
  if (lambda_min > lambda_max)
  {
    std::swap(lambda_min, lambda_max);
  }
  if (!(lambda_min > 0.0) || !std::isfinite(lambda_max))
  {
    throw ResolutionError("grid_for_scales: decay rates must be nonzero and finite");
  }
  const double r_max = policy.reach / std::sqrt(lambda_min);
  const double h = policy.spacing / std::sqrt(lambda_max);
  const double wanted = std::ceil(r_max / h) + 1.0;
  std::size_t nodes = policy.min_nodes;
  if (wanted > static_cast<double>(nodes))
  {
    nodes = wanted >= static_cast<double>(policy.max_nodes) ? policy.max_nodes
                                                          : static_cast<std::size_t>(wanted);
  }
  return RadialGrid::uniform(dim, nodes, r_max);
}

bool grid_resolves(const RadialGrid &grid, double lambda_min, double lambda_max,
                   const GridPolicy &policy, double slack)
{
  lambda_min = std::abs(lambda_min);
  lambda_max = std::abs(lambda_max);
  if (lambda_min > lambda_max)
  {
    std::swap(lambda_min, lambda_max);
  }
  const bool reach_ok = grid.r_max() * std::sqrt(lambda_min) * slack >= policy.reach;
  const bool spacing_ok = grid.h() * std::sqrt(lambda_max) <= policy.spacing * slack ||
                          grid.size() >= policy.max_nodes;
  return reach_ok && spacing_ok;
}

}  // namespace nlsnorm
