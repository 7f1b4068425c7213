#include "nlsnorm/flow_min.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <exception>

#include "nlsnorm/errors.hpp"
#include "nlsnorm/preconditioner.hpp"

namespace nlsnorm
{

void FlowOptions::validate() const
{
  if (!(dt > 0.0) || !(tol > 0.0))
  {
    throw ConfigError("flow options: dt and tol must be positive");
  }
  if (!(backtrack > 0.0 && backtrack < 1.0) || !(grow >= 1.0))
  {
    throw ConfigError("flow options: need 0 < backtrack < 1 <= grow");
  }
  if (max_iters < 0 || restarts < 0)
  {
    throw ConfigError("flow options: negative iteration or restart count");
  }
  if (frozen < -1 || frozen > 1)
  {
    throw ConfigError("flow options: frozen component must be -1, 0 or 1");
  }
  for (const auto &r : recipes)
  {
    if (r != "ground-pair" && r != "gaussian-pair" && r != "perturbed")
    {
      throw ConfigError("unknown initial-state recipe '" + r + "'");
    }
  }
}

RadialField project_sphere(const RadialField &u, double a)
{
  const double m = mass(u);
  if (!(m > 0.0))
  {
    throw NumericError("project_sphere: field has zero mass");
  }
  return u.scaled(std::sqrt(a / m));
}

namespace
{

// Negative values clipped, zero at r_max. For N >= 2 the origin carries no
// quadrature weight, so the flow never moves u_0; it is reset from the even
// quartic through u_1, u_2, u_3.
RadialField clipped(const RadialField &u)
{
  std::vector<double> v = u.data();
  if (u.grid().dim() >= 2)
  {
    v[0] = (15.0 * v[1] - 6.0 * v[2] + v[3]) / 10.0;
  }
  for (double &x : v)
  {
    x = std::max(x, 0.0);
  }
  v.back() = 0.0;
  return RadialField(u.grid_ptr(), std::move(v));
}

RadialField axpy(const RadialField &x, double a, const RadialField &y)
{
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    v[i] = x[i] + a * y[i];
  }
  return RadialField(x.grid_ptr(), std::move(v));
}

// Preconditioned gradient projected onto the tangent space of S(a) at u.
RadialField tangent_direction(const RadialField &g, const RadialField &u, double sigma)
{
  const SobolevPreconditioner P(u.grid(), sigma);
  const auto z = P.solve(g);
  const auto y = P.solve(u);
  return axpy(z, -inner(z, u) / inner(y, u), y);
}

}  // namespace

Solution descend(const SystemParams &pm, const State &init, const FlowOptions &opts)
{
  pm.validate();
  opts.validate();
  const Regime regime = classify_regime(pm);
  if (opts.frozen >= 0)
  {
    // J in the free component alone is bounded below on its sphere.
    const double p = opts.frozen == 0 ? pm.p2 : pm.p1;
    const double r = opts.frozen == 0 ? pm.r2 : pm.r1;
    if (!(p < pm.critical_exponent() && r < 2.0))
    {
      throw RegimeError("descend: the free component must be mass-subcritical with r < 2");
    }
  }
  else if (regime.tag != RegimeTag::SubcriticalMin &&
           regime.tag != RegimeTag::SubcriticalMinHighDim)
  {
    throw RegimeError("descend requires a mass-subcritical regime, got " + to_string(regime.tag));
  }
  const bool move1 = opts.frozen != 0, move2 = opts.frozen != 1;

  State st(move1 ? project_sphere(clipped(init.u1), pm.a1) : init.u1,
           move2 ? project_sphere(clipped(init.u2), pm.a2) : init.u2);
  Norms n = compute_norms(pm, st);
  double J = energy_J(pm, n);
  double dt = opts.dt;
  int it = 0;
  bool converged = false;
  std::string note;
  std::vector<double> history{J};
  for (;; ++it)
  {
    const auto lam = lagrange_multipliers(pm, n);
    const auto [g1, g2] = gradient_residual(pm, st, 0.0, 0.0);
    const auto R1 = axpy(g1, -lam.lambda1, st.u1);
    const auto R2 = axpy(g2, -lam.lambda2, st.u2);
    const double res = std::sqrt((move1 ? mass(R1) : 0.0) + (move2 ? mass(R2) : 0.0));
    if (res <= opts.tol)
    {
      converged = true;
      break;
    }
    if (it >= opts.max_iters)
    {
      note = "iteration limit reached";
      break;
    }
    const auto d1 = move1 ? tangent_direction(g1, st.u1, std::max(std::abs(lam.lambda1), 1e-10))
                          : RadialField::zeros(st.grid_ptr());
    const auto d2 = move2 ? tangent_direction(g2, st.u2, std::max(std::abs(lam.lambda2), 1e-10))
                          : RadialField::zeros(st.grid_ptr());
    const double slope = inner(g1, d1) + inner(g2, d2);
    const double slack = 1e-13 * std::max(1.0, std::abs(J));

    bool accepted = false;
    while (dt >= opts.dt_min)
    {
      State trial(move1 ? project_sphere(clipped(axpy(st.u1, -dt, d1)), pm.a1) : st.u1,
                  move2 ? project_sphere(clipped(axpy(st.u2, -dt, d2)), pm.a2) : st.u2);
      const Norms tn = compute_norms(pm, trial);
      const double tJ = energy_J(pm, tn);
      if (std::isfinite(tJ) && tJ <= J - 1e-4 * dt * slope + slack)
      {
        st = std::move(trial);
        n = tn;
        J = tJ;
        history.push_back(J);
        accepted = true;
        dt = std::min(dt * opts.grow, opts.dt_max);
        break;
      }
      dt *= opts.backtrack;
    }
    if (!accepted)
    {
      note = "step size fell below dt_min";
      break;
    }
  }

  Solution sol = evaluate_solution(pm, std::move(st));
  sol.iterations = it;
  sol.converged = converged;
  sol.method = "flow";
  sol.note = note;
  sol.history = std::move(history);
  return sol;
}

std::vector<std::pair<std::string, State>> initial_states(const SystemParams &pm,
                                                          const DecoupledPair &pair,
                                                          const FlowOptions &opts)
{
  std::vector<std::pair<std::string, State>> out;
  const auto grid = pair.state.grid_ptr();
  const double scale = std::sqrt(std::min(pair.lambda1, pair.lambda2));
  for (const auto &recipe : opts.recipes)
  {
    if (recipe == "ground-pair")
    {
      out.emplace_back(recipe, pair.state);
    }
    else if (recipe == "gaussian-pair")
    {
      // One shared profile of the width of the wider component.
      const auto g = RadialField::from_function(grid, [scale](double r)
                                                { return std::exp(-0.5 * scale * scale * r * r); });
      out.emplace_back(recipe, State(project_sphere(g, pm.a1), project_sphere(g, pm.a2)));
    }
    else
    {
      const double R = grid->r_max() / 4.0;
      for (int k = 0; k < opts.restarts; ++k)
      {
        std::mt19937_64 rng(opts.seed + static_cast<std::uint64_t>(k));
        std::uniform_real_distribution<double> coef(-1.0, 1.0);
        const auto bump = [&](const RadialField &u)
        {
          constexpr int modes = 4;
          double c[modes];
          for (double &x : c)
          {
            x = coef(rng) / modes;
          }
          std::vector<double> v(u.size());
          const auto r = grid->nodes();
          for (std::size_t i = 0; i < v.size(); ++i)
          {
            double xi = 0.0;
            for (int m = 0; m < modes; ++m)
            {
              xi += c[m] * std::cos((m + 1) * std::numbers::pi * std::min(r[i] / R, 1.0));
            }
            v[i] = u[i] * (1.0 + opts.perturbation * xi);
          }
          return RadialField(grid, std::move(v));
        };
        auto p1 = bump(pair.state.u1);
        auto p2 = bump(pair.state.u2);
        out.emplace_back("perturbed-" + std::to_string(k),
                         State(project_sphere(p1, pm.a1), project_sphere(p2, pm.a2)));
      }
    }
  }
  return out;
}

MultiStart global_min_estimate(const SystemParams &pm, const FlowOptions &opts)
{
  auto out = global_min_estimate(pm, decoupled_pair(pm, opts.grid, opts.policy), opts);
  if (opts.grid)
  {
    return out;
  }
  // The coupling changes the decay rates; finish on a grid sized for the
  // multipliers actually found.
  const Solution &b = out.best;
  if (b.lambda1 < 0.0 && b.lambda2 < 0.0 &&
      !grid_resolves(b.state.grid(), b.lambda1, b.lambda2, opts.policy))
  {
    const auto g = grid_for_scales(pm.dim, b.lambda1, b.lambda2, opts.policy);
    Solution fine = descend(pm, State(resample(b.state.u1, g), resample(b.state.u2, g)), opts);
    fine.note = "regridded to " + std::to_string(g->size()) + " nodes";
    out.runs.push_back(fine);
    out.labels.push_back("regrid");
    out.best = std::move(fine);
  }
  return out;
}

MultiStart global_min_estimate(const SystemParams &pm, const DecoupledPair &pair,
                               const FlowOptions &opts)
{
  opts.validate();
  const auto starts = initial_states(pm, pair, opts);
  if (starts.empty())
  {
    throw ConfigError("no initial-state recipes selected");
  }
  std::vector<std::optional<Solution>> slots(starts.size());
  std::vector<std::exception_ptr> errors(starts.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < starts.size(); ++k)
  {
    try
    {
      slots[k] = descend(pm, starts[k].second, opts);
    }
    catch (...)
    {
      errors[k] = std::current_exception();
    }
  }
  for (const auto &e : errors)
  {
    if (e)
    {
      std::rethrow_exception(e);
    }
  }
  MultiStart out{*slots[0], {}, {}};
  for (std::size_t k = 0; k < starts.size(); ++k)
  {
    out.runs.push_back(*slots[k]);
    out.labels.push_back(starts[k].first);
  }
  const auto better = [](const Solution &a, const Solution &b)
  {
    if (a.converged != b.converged)
    {
      return a.converged;
    }
    return a.J_value < b.J_value;
  };
  for (const auto &r : out.runs)
  {
    if (better(r, out.best))
    {
      out.best = r;
    }
  }
  return out;
}

}  // namespace nlsnorm
