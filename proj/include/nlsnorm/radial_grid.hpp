#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nlsnorm/stencil.hpp"

namespace nlsnorm
{

/// Uniform radial grid r_i = i h on [0, r_max] with trapezoidal weights
/// w_i = ω r_i^{N-1} h (halved at both ends).
class RadialGrid
{
public:
  static constexpr std::size_t min_nodes = 64;
  static constexpr std::size_t default_nodes = 4096;
  static constexpr double default_r_max = 20.0;

  static std::shared_ptr<const RadialGrid> uniform(int dim, std::size_t nodes = default_nodes,
                                                   double r_max = default_r_max);

  int dim() const { return dim_; }
  double r_max() const { return r_max_; }
  double h() const { return h_; }
  std::size_t size() const { return nodes_.size(); }
  double sphere_area() const { return sphere_area_; }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  const Stencil &stencil() const { return stencil_; }

  bool same_as(const RadialGrid &other) const;

private:
  RadialGrid(int dim, std::size_t nodes, double r_max);

  int dim_;
  double r_max_;
  double h_;
  double sphere_area_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  Stencil stencil_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Surface measure of the unit sphere in R^N; 2 for N = 1.
double sphere_area(int dim);

/// Radial function sampled at the nodes of a grid. Immutable.
class RadialField
{
public:
  RadialField(GridPtr grid, std::vector<double> values);

  static RadialField zeros(GridPtr grid);

  template <class F>
  static RadialField from_function(GridPtr grid, F &&f)
  {
    std::vector<double> v(grid->size());
    const auto r = grid->nodes();
    for (std::size_t i = 0; i < v.size(); ++i)
    {
      v[i] = f(r[i]);
    }
    return RadialField(std::move(grid), std::move(v));
  }

  const RadialGrid &grid() const { return *grid_; }
  const GridPtr &grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  const std::vector<double> &data() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  RadialField scaled(double c) const;

private:
  GridPtr grid_;
  std::vector<double> values_;
};

double integrate(const RadialGrid &grid, std::span<const double> f);
double mass(const RadialField &u);
double grad_norm_sq(const RadialField &u);
double lp_norm_pow(const RadialField &u, double p);
double mixed_term(const RadialField &u1, const RadialField &u2, double r1, double r2);

/// Weighted L^2 inner product and norm.
double inner(const RadialField &u, const RadialField &v);
double l2_norm(const RadialField &u);

/// -Δu on the grid; the value at r_max is set to 0.
RadialField apply_laplacian(const RadialField &u);

/// (s*u)(r) = e^{sN/2} u(e^s r). Steps larger than |s| = 2 are composed.
RadialField dilate(const RadialField &u, double s);

/// ∫|u1|^{r1} |s*u2|^{r2}. For s > 0 the substitution y = e^s x moves the
/// dilation onto u1 as a stretch, so neither factor is compressed.
double mixed_term_dilated(const RadialField &u1, const RadialField &u2, double r1, double r2,
                          double s);

/// Values of u interpolated onto another grid of the same dimension; zero
/// beyond the original r_max.
RadialField resample(const RadialField &u, GridPtr target);

/// Value of u interpolated at an arbitrary radius.
double evaluate(const RadialField &u, double r);

void write_csv(const RadialField &u, std::ostream &os);
nlohmann::json to_json(const RadialField &u, bool with_nodes = false);
RadialField field_from_json(const nlohmann::json &j);

/// Parses "uniform(M)" or a bare integer node count.
std::size_t parse_node_spec(const std::string &spec);

}  // namespace nlsnorm
