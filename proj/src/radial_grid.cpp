#include "nlsnorm/radial_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <regex>

#include <nlohmann/json.hpp>

#include "nlsnorm/errors.hpp"
#include "nlsnorm/interpolation.hpp"
#include "nlsnorm/kernels.hpp"

namespace nlsnorm
{

double sphere_area(int dim)
{
  if (dim == 1)
  {
    return 2.0;
  }
  const double n = static_cast<double>(dim);
  return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

RadialGrid::RadialGrid(int dim, std::size_t nodes, double r_max)
  : dim_(dim), r_max_(r_max), h_(r_max / static_cast<double>(nodes - 1)),
    sphere_area_(nlsnorm::sphere_area(dim)), nodes_(nodes), weights_(nodes),
    stencil_(dim, h_, nodes)
{
  for (std::size_t i = 0; i < nodes; ++i)
  {
    nodes_[i] = h_ * static_cast<double>(i);
  }
  nodes_.back() = r_max;
  for (std::size_t i = 0; i < nodes; ++i)
  {
    weights_[i] = sphere_area_ * std::pow(nodes_[i], dim - 1) * h_;
  }
  if (dim == 1)
  {
    weights_[0] = sphere_area_ * h_;
  }
  weights_.front() *= 0.5;
  weights_.back() *= 0.5;
}

std::shared_ptr<const RadialGrid> RadialGrid::uniform(int dim, std::size_t nodes, double r_max)
{
  if (dim < 1)
  {
    throw ConfigError("grid dimension must be >= 1");
  }
  if (nodes < min_nodes)
  {
    throw ConfigError("grid needs at least 64 nodes");
  }
  if (!(r_max > 0.0) || !std::isfinite(r_max))
  {
    throw ConfigError("r_max must be positive and finite");
  }
  return std::shared_ptr<const RadialGrid>(new RadialGrid(dim, nodes, r_max));
}

bool RadialGrid::same_as(const RadialGrid &other) const
{
  return this == &other ||
         (dim_ == other.dim_ && nodes_.size() == other.nodes_.size() && r_max_ == other.r_max_);
}

RadialField::RadialField(GridPtr grid, std::vector<double> values)
  : grid_(std::move(grid)), values_(std::move(values))
{
  if (!grid_)
  {
    throw StructuralError("RadialField without grid");
  }
  if (values_.size() != grid_->size())
  {
    throw StructuralError("RadialField: " + std::to_string(values_.size()) +
                          " values for a grid of " + std::to_string(grid_->size()) + " nodes");
  }
  for (double v : values_)
  {
    if (!std::isfinite(v))
    {
      throw NumericError("RadialField: non-finite value");
    }
  }
}

RadialField RadialField::zeros(GridPtr grid)
{
  const std::size_t n = grid->size();
  return RadialField(std::move(grid), std::vector<double>(n, 0.0));
}

RadialField RadialField::scaled(double c) const
{
  std::vector<double> v(values_);
  for (double &x : v)
  {
    x *= c;
  }
  return RadialField(grid_, std::move(v));
}

namespace
{

double checked(double value, const char *what)
{
  if (!std::isfinite(value))
  {
    throw NumericError(std::string(what) + ": non-finite result");
  }
  return value;
}

void require_same_grid(const RadialField &a, const RadialField &b)
{
  if (!a.grid().same_as(b.grid()))
  {
    throw StructuralError("fields live on different grids");
  }
}

}  // namespace

double integrate(const RadialGrid &grid, std::span<const double> f)
{
  if (f.size() != grid.size())
  {
    throw StructuralError("integrate: length mismatch");
  }
  return checked(kernels::weighted_sum(grid.weights(), f), "integrate");
}

double mass(const RadialField &u)
{
  return lp_norm_pow(u, 2.0);
}

double grad_norm_sq(const RadialField &u)
{
  const auto &g = u.grid();
  if (g.stencil().symmetric_form() && u.data().back() == 0.0)
  {
    // Summation by parts avoids the cancellation in <u, -Δu> on fine grids.
    std::vector<double> x(u.data());
    if (g.dim() == 3)
    {
      const auto r = g.nodes();
      for (std::size_t i = 0; i < x.size(); ++i)
      {
        x[i] *= r[i];
      }
    }
    const double scale = g.sphere_area() / g.h();
    return checked(scale * kernels::stiffness_sum(x, g.dim() == 1), "grad_norm_sq");
  }
  std::vector<double> lu(u.size());
  kernels::laplacian(g.stencil(), u.values(), lu);
  return checked(kernels::weighted_dot(g.weights(), u.values(), lu), "grad_norm_sq");
}

double lp_norm_pow(const RadialField &u, double p)
{
  if (!std::isfinite(p))
  {
    throw NumericError("lp_norm_pow: non-finite exponent");
  }
  if (p == 2.0)
  {
    return checked(kernels::weighted_dot(u.grid().weights(), u.values(), u.values()),
                   "lp_norm_pow");
  }
  return checked(kernels::power_sum(u.grid().weights(), u.values(), p), "lp_norm_pow");
}

double mixed_term(const RadialField &u1, const RadialField &u2, double r1, double r2)
{
  require_same_grid(u1, u2);
  return checked(kernels::mixed_sum(u1.grid().weights(), u1.values(), u2.values(), r1, r2),
                 "mixed_term");
}

double inner(const RadialField &u, const RadialField &v)
{
  require_same_grid(u, v);
  return checked(kernels::weighted_dot(u.grid().weights(), u.values(), v.values()), "inner");
}

double l2_norm(const RadialField &u)
{
  return std::sqrt(mass(u));
}

RadialField apply_laplacian(const RadialField &u)
{
  std::vector<double> out(u.size());
  kernels::laplacian(u.grid().stencil(), u.values(), out);
  out.back() = 0.0;
  return RadialField(u.grid_ptr(), std::move(out));
}

namespace
{

RadialField dilate_step(const RadialField &u, double s)
{
  const auto &g = u.grid();
  const MonotoneCubic f(g.h(), u.values());
  const double es = std::exp(s);
  const double amp = std::exp(s * g.dim() / 2.0);
  const auto r = g.nodes();
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    v[i] = amp * f(es * r[i]);
  }
  return RadialField(u.grid_ptr(), std::move(v));
}

}  // namespace

RadialField dilate(const RadialField &u, double s)
{
  if (!std::isfinite(s))
  {
    throw NumericError("dilate: non-finite s");
  }
  if (s == 0.0)
  {
    return u;
  }
  constexpr double max_step = 2.0;
  const int steps = static_cast<int>(std::ceil(std::abs(s) / max_step));
  const double ds = s / steps;
  RadialField out = dilate_step(u, ds);
  for (int k = 1; k < steps; ++k)
  {
    out = dilate_step(out, ds);
  }
  return out;
}

double mixed_term_dilated(const RadialField &u1, const RadialField &u2, double r1, double r2,
                          double s)
{
  require_same_grid(u1, u2);
  if (s <= 0.0)
  {
    return mixed_term(u1, dilate(u2, s), r1, r2);
  }
  // y = e^s x: ∫|u1(e^{-s} y)|^{r1} |u2(y)|^{r2} dy · e^{s N r2 / 2 - s N}.
  const int n = u1.grid().dim();
  const RadialField stretched = dilate(u1, -s);
  const double undo = std::exp(s * n / 2.0);  // removes the mass-preserving amplitude
  const double factor =
    std::pow(undo, r1) * std::exp(s * n * r2 / 2.0 - s * n);
  return factor * mixed_term(stretched, u2, r1, r2);
}

double evaluate(const RadialField &u, double r)
{
  const MonotoneCubic f(u.grid().h(), u.values());
  return f(r);
}

RadialField resample(const RadialField &u, GridPtr target)
{
  if (target->dim() != u.grid().dim())
  {
    throw StructuralError("resample: dimension mismatch");
  }
  if (target.get() == &u.grid())
  {
    return u;
  }
  const MonotoneCubic f(u.grid().h(), u.values());
  const auto r = target->nodes();
  std::vector<double> v(target->size());
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    v[i] = f(r[i]);
  }
  return RadialField(std::move(target), std::move(v));
}

void write_csv(const RadialField &u, std::ostream &os)
{
  os << "r,value\n";
  const auto r = u.grid().nodes();
  char buf[64];
  for (std::size_t i = 0; i < u.size(); ++i)
  {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", r[i], u[i]);
    os << buf;
  }
}

nlohmann::json to_json(const RadialField &u, bool with_nodes)
{
  nlohmann::json j;
  j["dim"] = u.grid().dim();
  j["r_max"] = u.grid().r_max();
  if (with_nodes)
  {
    j["nodes"] = std::vector<double>(u.grid().nodes().begin(), u.grid().nodes().end());
  }
  j["values"] = u.data();
  return j;
}

RadialField field_from_json(const nlohmann::json &j)
{
  try
  {
    const int dim = j.at("dim").get<int>();
    const double r_max = j.at("r_max").get<double>();
    auto values = j.at("values").get<std::vector<double>>();
    auto grid = RadialGrid::uniform(dim, values.size(), r_max);
    if (j.contains("nodes"))
    {
      const auto nodes = j.at("nodes").get<std::vector<double>>();
      if (nodes.size() != values.size())
      {
        throw StructuralError("field JSON: nodes and values differ in length");
      }
      for (std::size_t i = 0; i < nodes.size(); ++i)
      {
        if (std::abs(nodes[i] - grid->nodes()[i]) > 1e-9 * r_max)
        {
          throw ConfigError("field JSON: only uniform grids are supported");
        }
      }
    }
    return RadialField(std::move(grid), std::move(values));
  }
  catch (const nlohmann::json::exception &e)
  {
    throw ConfigError(std::string("field JSON: ") + e.what());
  }
}

std::size_t parse_node_spec(const std::string &spec)
{
  static const std::regex uniform_re(R"(\s*(?:uniform\s*\(\s*(\d+)\s*\)|(\d+))\s*)");
  std::smatch m;
  if (!std::regex_match(spec, m, uniform_re))
  {
    throw ConfigError("bad node spec '" + spec + "', expected uniform(M)");
  }
  const std::string digits = m[1].matched ? m[1].str() : m[2].str();
  return static_cast<std::size_t>(std::stoull(digits));
}

}  // namespace nlsnorm
