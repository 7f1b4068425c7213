#include "nlsnorm/preconditioner.hpp"

#include <cmath>

#include "nlsnorm/errors.hpp"

namespace nlsnorm
{

SobolevPreconditioner::SobolevPreconditioner(const RadialGrid &grid, double sigma) : sigma_(sigma)
{
  if (!(sigma > 0.0))
  {
    throw NumericError("preconditioner shift must be positive");
  }
  const std::size_t n = grid.size();
  const double h = grid.h();
  const double om = grid.sphere_area();
  const auto w = grid.weights();
  lower_.assign(n, 0.0);
  diag_.assign(n, 0.0);
  upper_.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i)
  {
    const double rm = (static_cast<double>(i) + 0.5) * h;
    const double f = om * std::pow(rm, grid.dim() - 1) / h;
    diag_[i] += f;
    diag_[i + 1] += f;
    upper_[i] = -f;
    lower_[i + 1] = -f;
  }
  for (std::size_t i = 0; i < n; ++i)
  {
    diag_[i] += sigma * w[i];
  }
  diag_[n - 1] = 1.0;
  lower_[n - 1] = 0.0;
  upper_[n - 2] = 0.0;

  // Thomas factorization in place: diag_ holds pivots, lower_ multipliers.
  for (std::size_t i = 1; i < n; ++i)
  {
    const double m = lower_[i] / diag_[i - 1];
    lower_[i] = m;
    diag_[i] -= m * upper_[i - 1];
  }
}

RadialField SobolevPreconditioner::solve(const RadialField &g) const
{
  const std::size_t n = g.size();
  if (n != diag_.size())
  {
    throw StructuralError("preconditioner applied on a different grid");
  }
  const auto w = g.grid().weights();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    x[i] = w[i] * g[i];
  }
  x[n - 1] = 0.0;
  for (std::size_t i = 1; i < n; ++i)
  {
    x[i] -= lower_[i] * x[i - 1];
  }
  x[n - 1] /= diag_[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
  {
    x[i] = (x[i] - upper_[i] * x[i + 1]) / diag_[i];
  }
  return RadialField(g.grid_ptr(), std::move(x));
}

}  // namespace nlsnorm
