#pragma once

#include <cmath>
#include <random>

#include "nlsnorm/energy.hpp"
#include "nlsnorm/radial_grid.hpp"

namespace testing_fields
{

// Positive smooth field: a centred bump (1 - (r/R)^2)^8 with R in [3, 7] plus
// a shell bump (1 - ((r - c)/w)^2)^8 supported away from the origin.
inline nlsnorm::RadialField random_smooth(const nlsnorm::GridPtr &g, std::mt19937_64 &rng)
{
  std::uniform_real_distribution<double> radius(3.0, 7.0), amp(0.5, 2.0), centre(2.5, 4.0),
    width(1.0, 2.0);
  const double R = radius(rng), A = amp(rng), c = centre(rng), w = width(rng), B = amp(rng);
  return nlsnorm::RadialField::from_function(g, [=](double r)
                                             {
                                               double v = 0.0;
                                               const double t = 1.0 - (r / R) * (r / R);
                                               if (t > 0.0)
                                               {
                                                 v += A * std::pow(t, 8);
                                               }
                                               const double x = (r - c) / w;
                                               if (std::abs(x) < 1.0)
                                               {
                                                 v += B * std::pow(1.0 - x * x, 8);
                                               }
                                               return v;
                                             });
}

// Rescaled so that mass(u) = a.
inline nlsnorm::RadialField on_sphere(const nlsnorm::RadialField &u, double a)
{
  return u.scaled(std::sqrt(a / nlsnorm::mass(u)));
}

}  // namespace testing_fields
