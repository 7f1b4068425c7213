#pragma once

#include <vector>

#include "nlsnorm/radial_grid.hpp"

namespace nlsnorm
{

/// Shifted radial Laplacian  -Δ + σ  assembled as the three-point
/// finite-volume stiffness matrix K + σW, W the quadrature weights, with a
/// Dirichlet row at r_max. solve(g) returns (K + σW)^{-1} W g, which is
/// self-adjoint and positive in the weighted inner product.
class SobolevPreconditioner
{
public:
  SobolevPreconditioner(const RadialGrid &grid, double sigma);

  RadialField solve(const RadialField &g) const;
  double sigma() const { return sigma_; }

private:
  double sigma_;
  std::vector<double> lower_, diag_, upper_;
};

}  // namespace nlsnorm
