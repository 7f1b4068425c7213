#pragma once

// Node-wise loops that dominate the solvers. Every kernel has a plain serial
// reference (kernels::serial) and an OpenMP version (kernels::omp). The OpenMP
// reductions sum fixed-size blocks and then combine the block partials in
// order, so results do not depend on the thread count.

#include <cmath>
#include <cstddef>
#include <span>

#include "nlsnorm/stencil.hpp"

namespace nlsnorm::kernels
{

inline constexpr std::size_t reduction_block = 1024;
inline constexpr std::size_t parallel_threshold = 8192;

namespace serial
{
double weighted_sum(std::span<const double> w, std::span<const double> f);
double weighted_dot(std::span<const double> w, std::span<const double> f,
                    std::span<const double> g);
double power_sum(std::span<const double> w, std::span<const double> u, double p);
double mixed_sum(std::span<const double> w, std::span<const double> u1,
                 std::span<const double> u2, double r1, double r2);
// Σ x_i (-D x)_i over the nodes before the last, D the five-point second
// difference without the 1/h² factor, written as a sum of squared
// differences. x must vanish at the last node; reflections as in Stencil for
// the symmetric forms (even_origin: N = 1 with x = u; otherwise x = r u).
double stiffness_sum(std::span<const double> x, bool even_origin);
void laplacian(const Stencil &st, std::span<const double> u, std::span<double> out);
}  // namespace serial

namespace omp
{
double weighted_sum(std::span<const double> w, std::span<const double> f);
double weighted_dot(std::span<const double> w, std::span<const double> f,
                    std::span<const double> g);
double power_sum(std::span<const double> w, std::span<const double> u, double p);
double mixed_sum(std::span<const double> w, std::span<const double> u1,
                 std::span<const double> u2, double r1, double r2);
double stiffness_sum(std::span<const double> x, bool even_origin);
void laplacian(const Stencil &st, std::span<const double> u, std::span<double> out);
}  // namespace omp

// Library entry points; these forward to the OpenMP versions.
using omp::laplacian;
using omp::mixed_sum;
using omp::power_sum;
using omp::stiffness_sum;
using omp::weighted_dot;
using omp::weighted_sum;

// |x|^e with the convention 0^e = 0 for e > 0.
inline double abs_pow(double x, double e)
{
  const double a = x < 0.0 ? -x : x;
  if (a == 0.0)
  {
    return e > 0.0 ? 0.0 : (e == 0.0 ? 1.0 : 0.0);
  }
  return std::pow(a, e);
}

}  // namespace nlsnorm::kernels
