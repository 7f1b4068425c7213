#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nlsnorm
{

/// Piecewise cubic Hermite interpolant of uniformly spaced samples x_i = i h.
///
/// Slopes come from fourth-order central differences, with the sample treated
/// as an even function about 0, then pass through a Hyman-type filter: where
/// the four secants around a node share a sign, the slope is clamped to
/// 3 min(|s_-|, |s_+|) of the adjacent ones, which keeps the interpolant
/// monotone there. Nodes next to an extremum keep the unclamped slope so the
/// error stays fourth order. Outside [0, x_max] the interpolant is 0.
class MonotoneCubic
{
public:
  MonotoneCubic(double h, std::span<const double> values);

  double operator()(double x) const;
  double x_max() const { return h_ * static_cast<double>(y_.size() - 1); }

private:
  double h_;
  std::vector<double> y_;
  std::vector<double> d_;
};

}  // namespace nlsnorm
