#include "nlsnorm/interpolation.hpp"

#include <algorithm>
#include <cmath>

#include "nlsnorm/errors.hpp"

namespace nlsnorm
{

MonotoneCubic::MonotoneCubic(double h, std::span<const double> values)
  : h_(h), y_(values.begin(), values.end()), d_(values.size(), 0.0)
{
  const std::size_t n = y_.size();
  if (n < 5)
  {
    throw StructuralError("MonotoneCubic needs at least 5 samples");
  }
  auto y = [&](long i) -> double
  {
    if (i < 0)
    {
      return y_[static_cast<std::size_t>(-i)];
    }
    return y_[static_cast<std::size_t>(i)];
  };
  const long m = static_cast<long>(n);
  for (long i = 0; i < m; ++i)
  {
    double d;
    if (i + 2 < m)
    {
      d = (y(i - 2) - 8.0 * y(i - 1) + 8.0 * y(i + 1) - y(i + 2)) / (12.0 * h_);
    }
    else if (i + 1 < m)
    {
      d = (y(i + 1) - y(i - 1)) / (2.0 * h_);
    }
    else
    {
      d = (3.0 * y(i) - 4.0 * y(i - 1) + y(i - 2)) / (2.0 * h_);
    }
    if (i > 0 && i + 1 < m)
    {
      const double sm = (y(i) - y(i - 1)) / h_;
      const double sp = (y(i + 1) - y(i)) / h_;
      const double smm = i > 1 ? (y(i - 1) - y(i - 2)) / h_ : sm;
      const double spp = i + 2 < m ? (y(i + 2) - y(i + 1)) / h_ : sp;
      if (sm * sp > 0.0 && smm * sm > 0.0 && sp * spp > 0.0)
      {
        const double bound = 3.0 * std::min(std::abs(sm), std::abs(sp));
        if (d * sp <= 0.0)
        {
          d = 0.0;
        }
        else if (std::abs(d) > bound)
        {
          d = std::copysign(bound, sp);
        }
      }
      else if (sm == 0.0 && sp == 0.0)
      {
        d = 0.0;
      }
    }
    d_[static_cast<std::size_t>(i)] = (i == 0) ? 0.0 : d;
  }
}

double MonotoneCubic::operator()(double x) const
{
  if (x < 0.0)
  {
    x = -x;
  }
  const double xm = x_max();
  if (x > xm)
  {
    return 0.0;
  }
  std::size_t k = static_cast<std::size_t>(x / h_);
  if (k >= y_.size() - 1)
  {
    k = y_.size() - 2;
  }
  const double t = (x - h_ * static_cast<double>(k)) / h_;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[k] + h10 * h_ * d_[k] + h01 * y_[k + 1] + h11 * h_ * d_[k + 1];
}

}  // namespace nlsnorm
