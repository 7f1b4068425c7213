#include "nlsnorm/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace nlsnorm::kernels
{

namespace
{

// Value at index j of the extension of x_0..x_{m-1} that is odd about m-1 and
// odd (even_origin = false) or even about 0, periodic with period 2(m-1) or
// 4(m-1).
double reflected(std::span<const double> x, std::size_t j, bool even_origin)
{
  const std::size_t m1 = x.size() - 1;
  const std::size_t period = even_origin ? 4 * m1 : 2 * m1;
  j %= period;
  double sign = 1.0;
  if (j >= 2 * m1)
  {
    j -= 2 * m1;
    sign = even_origin ? -1.0 : 1.0;
  }
  if (j > m1)
  {
    j = 2 * m1 - j;
    sign = -sign;
  }
  return sign * x[j];
}

double stiffness_term(std::span<const double> x, std::size_t i, bool even_origin)
{
  const double a = reflected(x, i, even_origin);
  const double d1 = reflected(x, i + 1, even_origin) - a;
  const double d2 = reflected(x, i + 2, even_origin) - a;
  return (4.0 / 3.0) * d1 * d1 - (1.0 / 12.0) * d2 * d2;
}

}  // namespace

namespace serial
{

double weighted_sum(std::span<const double> w, std::span<const double> f)
{
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
  {
    acc += w[i] * f[i];
  }
  return acc;
}

double weighted_dot(std::span<const double> w, std::span<const double> f,
                    std::span<const double> g)
{
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
  {
    acc += w[i] * f[i] * g[i];
  }
  return acc;
}

double power_sum(std::span<const double> w, std::span<const double> u, double p)
{
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
  {
    acc += w[i] * abs_pow(u[i], p);
  }
  return acc;
}

double mixed_sum(std::span<const double> w, std::span<const double> u1,
                 std::span<const double> u2, double r1, double r2)
{
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
  {
    acc += w[i] * abs_pow(u1[i], r1) * abs_pow(u2[i], r2);
  }
  return acc;
}

double stiffness_sum(std::span<const double> x, bool even_origin)
{
  const std::size_t period = (even_origin ? 4 : 2) * (x.size() - 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < period; ++i)
  {
    acc += stiffness_term(x, i, even_origin);
  }
  return acc / (even_origin ? 4.0 : 2.0);
}

void laplacian(const Stencil &st, std::span<const double> u, std::span<double> out)
{
  for (std::size_t i = 0; i < u.size(); ++i)
  {
    out[i] = st.apply_row(i, u.data());
  }
}

}  // namespace serial

namespace omp
{

namespace
{

// Blocked reduction: term(i) summed within fixed blocks, blocks combined in
// index order.
template <class Term>
double blocked_sum(std::size_t n, Term term)
{
  const std::size_t nblocks = (n + reduction_block - 1) / reduction_block;
  std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static) if (n >= parallel_threshold)
  for (std::size_t b = 0; b < nblocks; ++b)
  {
    const std::size_t lo = b * reduction_block;
    const std::size_t hi = std::min(n, lo + reduction_block);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
    {
      acc += term(i);
    }
    partial[b] = acc;
  }
  double total = 0.0;
  for (double v : partial)
  {
    total += v;
  }
  return total;
}

}  // namespace

double weighted_sum(std::span<const double> w, std::span<const double> f)
{
  return blocked_sum(w.size(), [&](std::size_t i) { return w[i] * f[i]; });
}

double weighted_dot(std::span<const double> w, std::span<const double> f,
                    std::span<const double> g)
{
  return blocked_sum(w.size(), [&](std::size_t i) { return w[i] * f[i] * g[i]; });
}

double power_sum(std::span<const double> w, std::span<const double> u, double p)
{
  return blocked_sum(w.size(), [&](std::size_t i) { return w[i] * abs_pow(u[i], p); });
}

double mixed_sum(std::span<const double> w, std::span<const double> u1,
                 std::span<const double> u2, double r1, double r2)
{
  return blocked_sum(w.size(), [&](std::size_t i)
                     { return w[i] * abs_pow(u1[i], r1) * abs_pow(u2[i], r2); });
}

double stiffness_sum(std::span<const double> x, bool even_origin)
{
  const std::size_t period = (even_origin ? 4 : 2) * (x.size() - 1);
  return blocked_sum(period, [&](std::size_t i) { return stiffness_term(x, i, even_origin); }) /
         (even_origin ? 4.0 : 2.0);
}

void laplacian(const Stencil &st, std::span<const double> u, std::span<double> out)
{
  const std::size_t n = u.size();
#pragma omp parallel for schedule(static) if (n >= parallel_threshold)
  for (std::size_t i = 0; i < n; ++i)
  {
    out[i] = st.apply_row(i, u.data());
  }
}

}  // namespace omp

}  // namespace nlsnorm::kernels
