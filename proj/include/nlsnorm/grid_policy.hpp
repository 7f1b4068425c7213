#pragma once

#include <cstddef>

#include "nlsnorm/radial_grid.hpp"

namespace nlsnorm
{

/// Sizing rule for grids that must resolve components decaying like
/// e^{-√|λ| r}: r_max = reach/√|λ|_min and h ≤ spacing/√|λ|_max.
struct GridPolicy
{
  double reach = 20.0;
  double spacing = 0.008;
  std::size_t min_nodes = 4096;
  std::size_t max_nodes = std::size_t{1} << 19;
};

GridPtr grid_for_scales(int dim, double lambda_min, double lambda_max,
                        const GridPolicy &policy = {});

/// True when grid meets the policy for the given |λ| range, up to factor
/// slack on both reach and spacing.
bool grid_resolves(const RadialGrid &grid, double lambda_min, double lambda_max,
                   const GridPolicy &policy = {}, double slack = 1.5);

}  // namespace nlsnorm
