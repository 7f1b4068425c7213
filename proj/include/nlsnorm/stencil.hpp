#pragma once

#include <array>
#include <cstddef>

namespace nlsnorm
{

/// Fourth-order radial Laplacian stencil on a uniform grid r_i = i*h.
///
/// For N = 1 and N = 3 the operator is written in the symmetrized variable
/// v = r^{(N-1)/2} u, for which -Δu = -r^{-(N-1)/2} v''. The five-point second
/// difference of v is then exactly self-adjoint with respect to the
/// trapezoidal weights ω r^{N-1} h. Other dimensions use the direct form
/// u'' + (N-1)/r u' with five-point differences, which is fourth-order accurate
/// but only approximately self-adjoint.
///
/// Ghost values: even reflection of u at the origin (odd for v = r u), odd
/// reflection about r_max. At the origin the singular term is replaced by
/// its limit so that -Δu(0) = -N u''(0).
class Stencil
{
public:
  static constexpr int max_entries = 7;

  struct Row
  {
    std::array<std::size_t, max_entries> cols{};
    std::array<double, max_entries> coefs{};
    int count = 0;

    void add(std::size_t j, double c)
    {
      for (int k = 0; k < count; ++k)
      {
        if (cols[k] == j)
        {
          coefs[k] += c;
          return;
        }
      }
      cols[count] = j;
      coefs[count] = c;
      ++count;
    }
  };

  Stencil() = default;
  Stencil(int dim, double h, std::size_t size) : dim_(dim), h_(h), size_(size) {}

  int dim() const { return dim_; }
  double h() const { return h_; }
  std::size_t size() const { return size_; }
  bool symmetric_form() const { return dim_ == 1 || dim_ == 3; }

  /// Coefficients of row i of -Δ_h acting on nodal values u_0..u_{M-1}.
  Row row(std::size_t i) const
  {
    Row out;
    const double inv12h2 = 1.0 / (12.0 * h_ * h_);
    static constexpr std::array<double, 5> d2 = {-1.0, 16.0, -30.0, 16.0, -1.0};
    static constexpr std::array<double, 5> d1 = {1.0, -8.0, 0.0, 8.0, -1.0};

    if (i == 0 && dim_ != 1)
    {
      // -N u''(0), even extension.
      const double s = -static_cast<double>(dim_) * inv12h2;
      out.add(0, -30.0 * s);
      out.add(1, 32.0 * s);
      out.add(2, -2.0 * s);
      return out;
    }

    const double ri = h_ * static_cast<double>(i);
    for (int k = 0; k < 5; ++k)
    {
      const long j = static_cast<long>(i) + k - 2;
      if (dim_ == 3)
      {
        // v = r u, odd ghosts; -(1/r_i) D2 v.
        add_ghosted(out, j, -d2[k] * inv12h2 / ri, /*weight_by_r=*/true, /*odd=*/true);
      }
      else if (dim_ == 1)
      {
        add_ghosted(out, j, -d2[k] * inv12h2, false, false);
      }
      else
      {
        const double c = -(d2[k] * inv12h2 + (dim_ - 1) / ri * d1[k] / (12.0 * h_));
        add_ghosted(out, j, c, false, false);
      }
    }
    return out;
  }

  double apply_row(std::size_t i, const double *u) const
  {
    const Row rr = row(i);
    double acc = 0.0;
    for (int k = 0; k < rr.count; ++k)
    {
      acc += rr.coefs[k] * u[rr.cols[k]];
    }
    return acc;
  }

private:
  // Adds coefficient c on the (possibly ghost) index j of x, where x = u or
  // x = r u depending on weight_by_r.
  void add_ghosted(Row &out, long j, double c, bool weight_by_r, bool odd) const
  {
    const long m = static_cast<long>(size_);
    auto rnode = [this](long idx) { return h_ * static_cast<double>(idx); };
    if (j < 0)
    {
      const long jj = -j;
      const double sign = odd ? -1.0 : 1.0;
      out.add(static_cast<std::size_t>(jj), sign * c * (weight_by_r ? rnode(jj) : 1.0));
    }
    else if (j >= m)
    {
      // Odd reflection about r_max, consistent with the Dirichlet value
      // x_{m-1} = 0; keeps the discrete operator symmetric up to the boundary.
      const long jj = 2 * (m - 1) - j;
      out.add(static_cast<std::size_t>(jj), -c * (weight_by_r ? rnode(jj) : 1.0));
    }
    else
    {
      out.add(static_cast<std::size_t>(j), c * (weight_by_r ? rnode(j) : 1.0));
    }
  }

  int dim_ = 1;
  double h_ = 1.0;
  std::size_t size_ = 0;
};

}  // namespace nlsnorm
