#include "nlsnorm/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "nlsnorm/errors.hpp"
#include "nlsnorm/flow_min.hpp"

namespace nlsnorm
{

DilatedPair::DilatedPair(const SystemParams &params, RadialField u1, RadialField u2)
  : params_(params), u1_(std::move(u1)), u2_(std::move(u2)),
    n_(compute_norms(params, State(u1_, u2_)))
{
}

double DilatedPair::lp1(double sigma1, double e) const
{
  const int N = params_.dim;
  return std::exp(sigma1 * N * (e - 2.0) / 2.0) * lp_norm_pow(u1_, e);
}

DilatedPair::Split DilatedPair::split(double sigma1, double sigma2) const
{
  const auto &pm = params_;
  const double N = pm.dim;
  const double first = 0.5 * n_.grad1 * std::exp(2.0 * sigma1) -
                       pm.mu1 / pm.p1 * n_.pow1 * std::exp(sigma1 * N * (pm.p1 - 2.0) / 2.0);
  double rest = 0.5 * n_.grad2 * std::exp(2.0 * sigma2) -
                pm.mu2 / pm.p2 * n_.pow2 * std::exp(sigma2 * N * (pm.p2 - 2.0) / 2.0);
  if (pm.beta != 0.0)
  {
    rest -= pm.beta * std::exp(sigma1 * N * (pm.r1 + pm.r2) / 2.0 - sigma1 * N) *
            mixed_term_dilated(u1_, u2_, pm.r1, pm.r2, sigma2 - sigma1);
  }
  return {first, rest};
}

State Path::state_at(double tt, const GridPolicy &policy) const
{
  const auto &pm = pair.params();
  const double sg = sigma(tt);
  const double l2 = std::exp(2.0 * sg) * ground.lambda2;
  const auto g = grid_for_scales(pm.dim, std::min(ground.lambda1, l2),
                                 std::max(ground.lambda1, l2), policy);
  // σ*u_a(r) = e^{σN/2} λ^{1/(p-2)} w(√λ e^σ r).
  const auto &gs = ground.ground2;
  const double amp = std::exp(sg * pm.dim / 2.0) * std::pow(ground.lambda2, 1.0 / (pm.p2 - 2.0));
  const double k = std::sqrt(ground.lambda2) * std::exp(sg);
  std::vector<double> v(g->size());
  const auto r = g->nodes();
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    v[i] = amp * (*gs.profile)(k * r[i]);
  }
  v.back() = 0.0;
  return State(rescale_to_mass(ground.ground1, pm.a1, g).u,
               project_sphere(RadialField(g, std::move(v)), pm.a2));
}

namespace
{

RadialField gaussian_on(const GridPtr &g, double lambda, double a)
{
  const double k = std::sqrt(lambda);
  auto v = RadialField::from_function(g, [&](double r) { return std::exp(-0.5 * k * k * r * r); });
  std::vector<double> x = v.data();
  x.back() = 0.0;
  return project_sphere(RadialField(g, std::move(x)), a);
}

RadialField exponential_on(const GridPtr &g, double lambda, double a)
{
  const double k = std::sqrt(lambda);
  auto v = RadialField::from_function(g, [&](double r) { return 1.0 / std::cosh(k * r); });
  std::vector<double> x = v.data();
  x.back() = 0.0;
  return project_sphere(RadialField(g, std::move(x)), a);
}

}  // namespace

InfBEstimate sample_inf_B(const SystemParams &pm, const Threshold &c, const DecoupledPair &pair)
{
  const auto &g = pair.state.grid_ptr();
  const std::vector<std::pair<std::string, RadialField>> u1s{
    {"ground", pair.state.u1},
    {"gaussian", gaussian_on(g, pair.lambda1, pm.a1)},
    {"sech", exponential_on(g, pair.lambda1, pm.a1)}};
  const std::vector<std::pair<std::string, RadialField>> u2s{
    {"ground", pair.state.u2},
    {"gaussian", gaussian_on(g, pair.lambda2, pm.a2)},
    {"sech", exponential_on(g, pair.lambda2, pm.a2)}};
  const std::vector<double> sigmas{-1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0};
  const double e = c.norm_exponent();

  const DilatedPair lower(pm, pair.state.u1, pair.state.u2);
  const double J_lower = lower.split(0.0, 0.0).first;
  InfBEstimate best{std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity(), 0.0, "", "", 0};
  for (const auto &[t1, u1] : u1s)
  {
    for (const auto &[t2, u2] : u2s)
    {
      const DilatedPair dp(pm, u1, u2);
      const double shift = t1 == "ground" ? 0.0 : dp.split(0.0, 0.0).first - J_lower;
      for (double s1 : sigmas)
      {
        const double target = 2.0 * c.from_norm_pow(dp.lp1(s1, e));
        const double s2 = 0.5 * std::log(target / dp.norms().grad2);
        const auto J = dp.split(s1, s2);
        const double over = (J.first - dp.split(0.0, 0.0).first) + shift + J.rest;
        ++best.samples;
        if (over < best.over_lower)
        {
          best.value = J.total();
          best.over_lower = over;
          best.sigma1 = s1;
          best.u1_tag = t1;
          best.u2_tag = t2;
        }
      }
    }
  }
  return best;
}

Path build_path(const SystemParams &pm, const DecoupledPair &pair, const Threshold &c,
                const InfBEstimate &inf_B, const PathOptions &opts)
{
  if (classify_regime(pm).tag != RegimeTag::Mixed)
  {
    throw RegimeError("build_path: requires the mixed regime");
  }
  if (opts.samples < 3 || !(opts.s_growth > 1.0) || !(opts.s_initial > 0.0) ||
      !(opts.scan_step > 0.0))
  {
    throw ConfigError("build_path: need samples >= 3, s_growth > 1, s_initial > 0, scan_step > 0");
  }
  Path path{pair, DilatedPair(pm, pair.state.u1, pair.state.u2), 0.0, 0.0, c(pair.state.u1), {}, {}};
  const double G = path.pair.norms().grad2;
  // The first part is J(u̲, 0) at every point of the path.
  const auto start_ok = [&](double s)
  { return std::exp(-2.0 * s) * G <= path.c_lower && path.pair.split(0.0, -s).rest < inf_B.over_lower; };
  const auto end_ok = [&](double sg)
  {
    const auto J = path.pair.split(0.0, sg);
    return std::exp(2.0 * sg) * G > 2.0 * path.c_lower && J.total() < 0.0 && J.rest < inf_B.over_lower;
  };
  std::ostringstream why;
  bool found = false;
  for (double s = opts.s_initial; s <= opts.s_max; s *= opts.s_growth)
  {
    path.s = s;
    if (start_ok(s) && end_ok(s))
    {
      found = true;
      break;
    }
    const auto J0 = path.pair.split(0.0, -s);
    const auto J1 = path.pair.split(0.0, s);
    why.str("");
    why << "s=" << s << " J(0)-J(u,0)=" << J0.rest << " J(1)=" << J1.total()
        << " inf_B-J(u,0)=" << inf_B.over_lower << " |grad u2|^2=" << G << " c=" << path.c_lower;
  }
  if (!found)
  {
    throw GeometryError("build_path: endpoint conditions not met up to s_max (" + why.str() + ")");
  }
  path.sigma_end = path.s;
  if (opts.stop_in_well)
  {
    // Past the first admissible endpoint, walk downhill to the bottom of the well.
    double sg = -path.s;
    while (sg < path.s && !end_ok(sg))
    {
      sg += opts.scan_step;
    }
    double prev = path.pair.split(0.0, sg).rest;
    while (sg + opts.scan_step < path.s)
    {
      const double next = path.pair.split(0.0, sg + opts.scan_step).rest;
      if (!(next < prev))
      {
        break;
      }
      sg += opts.scan_step;
      prev = next;
    }
    path.sigma_end = std::min(sg, path.s);
  }
  path.t.resize(opts.samples);
  path.J.resize(opts.samples);
  for (int k = 0; k < opts.samples; ++k)
  {
    path.t[k] = static_cast<double>(k) / (opts.samples - 1);
    path.J[k] = path.J_at(path.t[k]);
  }
  return path;
}

PathMax path_max(const Path &path, const PathOptions &opts, const GridPolicy &policy)
{
  const auto k = static_cast<std::size_t>(std::max_element(path.J.begin(), path.J.end()) -
                                          path.J.begin());
  if (k == 0 || k + 1 == path.J.size())
  {
    return {path.t[k], path.J[k], path.state_at(path.t[k], policy)};
  }
  // Golden section on the bracketing samples.
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = path.t[k - 1], b = path.t[k + 1];
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = path.J_at(x1), f2 = path.J_at(x2);
  while (b - a > opts.golden_tol)
  {
    if (f1 > f2)
    {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = path.J_at(x1);
    }
    else
    {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = path.J_at(x2);
    }
  }
  double t = 0.5 * (a + b);
  double J = path.J_at(t);
  if (path.J[k] > J)
  {
    t = path.t[k];
    J = path.J[k];
  }
  return {t, J, path.state_at(t, policy)};
}

Solution refine_resolved(const SystemParams &pm, const State &init, const NewtonOptions &opts,
                         const GridPolicy &policy)
{
  Solution sol = newton_refine(pm, init, opts);
  if (!sol.converged)
  {
    return sol;
  }
  const double lo = std::min(-sol.lambda1, -sol.lambda2);
  const double hi = std::max(-sol.lambda1, -sol.lambda2);
  if (grid_resolves(sol.state.grid(), lo, hi, policy))
  {
    return sol;
  }
  const auto g = grid_for_scales(pm.dim, lo, hi, policy);
  const State moved(project_sphere(resample(sol.state.u1, g), pm.a1),
                    project_sphere(resample(sol.state.u2, g), pm.a2));
  Solution again = newton_refine(pm, moved, sol.lambda1, sol.lambda2, opts);
  again.iterations += sol.iterations;
  again.note = again.note.empty() ? "regrid" : again.note + "; regrid";
  return again;
}

namespace
{

struct Branch
{
  State state;
  double lambda1;
  double lambda2;
  double beta;
};

// Natural continuation of a converged point in β toward target. The step
// grows by 1.5 after a success and halves after a failure, down to
// min_step |target - start|.
std::optional<Solution> continue_to(const SystemParams &params, double target, Branch &at,
                                    const NewtonOptions &newton, const GridPolicy &policy,
                                    double min_step, int &halvings)
{
  SystemParams pm = params;
  std::optional<Solution> last;
  if (target == at.beta)
  {
    pm.beta = target;
    last = newton_refine(pm, at.state, at.lambda1, at.lambda2, newton);
    return last && last->converged ? last : std::nullopt;
  }
  const double span = target - at.beta;
  double step = span;
  while (std::abs(step) >= min_step * std::abs(span))
  {
    pm.beta = std::abs(target - at.beta) <= std::abs(step) ? target : at.beta + step;
    // The warm start moves onto a grid for the current multipliers.
    State init = at.state;
    const double lo = std::min(-at.lambda1, -at.lambda2), hi = std::max(-at.lambda1, -at.lambda2);
    if (!grid_resolves(init.grid(), lo, hi, policy))
    {
      const auto g = grid_for_scales(pm.dim, lo, hi, policy);
      init = State(project_sphere(resample(at.state.u1, g), pm.a1),
                   project_sphere(resample(at.state.u2, g), pm.a2));
    }
    std::optional<Solution> s;
    try
    {
      s = refine_resolved(pm, init, newton, policy);
    }
    catch (const std::runtime_error &)
    {
      s.reset();
    }
    if (s && s->converged)
    {
      at = {s->state, s->lambda1, s->lambda2, pm.beta};
      last = std::move(s);
      if (at.beta == target)
      {
        return last;
      }
      step *= 1.5;
    }
    else
    {
      step *= 0.5;
      ++halvings;
    }
  }
  return std::nullopt;
}

}  // namespace

GammaEstimate gamma_estimate(const SystemParams &pm, const GammaOptions &opts)
{
  pm.validate();
  opts.newton.validate();
  if (classify_regime(pm).tag != RegimeTag::Mixed)
  {
    throw RegimeError("gamma_estimate: requires the mixed regime");
  }
  const auto pair = decoupled_pair(pm, opts.grid, opts.policy);
  const Threshold c(pm);
  const auto infB = sample_inf_B(pm, c, pair);
  const auto path = build_path(pm, pair, c, infB, opts.path);
  const auto top = path_max(path, opts.path, opts.policy);
  Solution sol = refine_resolved(pm, top.state, opts.newton, opts.policy);
  sol.method = "newton from path maximum";
  std::string source = "path maximum";
  if (!sol.converged && opts.continuation_fallback)
  {
    // At β = 0 the path maximum is the decoupled pair itself.
    Branch at{pair.state, -pair.lambda1, -pair.lambda2, 0.0};
    int halvings = 0;
    auto alt = continue_to(pm, pm.beta, at, opts.newton, opts.policy, 1e-3, halvings);
    if (alt)
    {
      source = "beta continuation (path-maximum Newton: " + sol.note + ")";
      sol = std::move(*alt);
      sol.method = "newton with beta continuation from the decoupled pair";
    }
    else
    {
      source = "path maximum; beta continuation stopped at beta " + std::to_string(at.beta);
    }
  }

  const double level = pair.level();
  const double slack = opts.slack * std::abs(level);
  const bool bracket = sol.converged && infB.value <= sol.J_value &&
                       sol.J_value <= top.J_max + slack && top.J_max <= level + slack;
  std::ostringstream note;
  note << "solution from " << source << "; inf_B from " << infB.samples << " samples, best u1=" << infB.u1_tag << " (sigma "
       << infB.sigma1 << "), u2=" << infB.u2_tag;
  return {top.J_max, infB.value, level,       level < 0.0, path.c_lower,
          path.s,    top.t_star, std::move(sol), bracket,   note.str()};
}

State synchronized_state(const SystemParams &pm, GridPtr grid, const GridPolicy &policy)
{
  pm.validate();
  const auto unit = RadialGrid::uniform(pm.dim);
  const auto g1 = solve_unit_ground(ScalarProblem(pm.dim, pm.p1, pm.mu1 + pm.beta * pm.r1), unit);
  const bool same = pm.p1 == pm.p2 && pm.mu1 + pm.beta * pm.r1 == pm.mu2 + pm.beta * pm.r2;
  const auto g2 =
    same ? g1 : solve_unit_ground(ScalarProblem(pm.dim, pm.p2, pm.mu2 + pm.beta * pm.r2), unit);
  if (!grid)
  {
    const double l1 = rescaled_lambda(g1, pm.a1);
    const double l2 = rescaled_lambda(g2, pm.a2);
    grid = grid_for_scales(pm.dim, std::min(l1, l2), std::max(l1, l2), policy);
  }
  return State(rescale_to_mass(g1, pm.a1, grid).u, rescale_to_mass(g2, pm.a2, grid).u);
}

std::vector<BetaRow> beta_sweep(const SystemParams &params, const std::vector<double> &betas,
                                const SweepOptions &opts, std::vector<Solution> *solutions)
{
  params.validate();
  opts.newton.validate();
  for (double b : betas)
  {
    SystemParams pm = params;
    pm.beta = b;
    pm.validate();
    if (classify_regime(pm).tag != RegimeTag::Supercritical)
    {
      throw RegimeError("beta_sweep: requires the supercritical regime");
    }
  }
  SystemParams base = params;
  base.beta = 0.0;
  const auto pair = decoupled_pair(base, nullptr, opts.policy);
  Branch at{pair.state, -pair.lambda1, -pair.lambda2, 0.0};

  std::vector<BetaRow> rows;
  for (double target : betas)
  {
    int halvings = 0;
    auto sol = continue_to(params, target, at, opts.newton, opts.policy, opts.min_step, halvings);
    if (sol)
    {
      BetaRow row{target,        true,          sol->J_value,
                  sol->lambda1,  sol->lambda2,  sol->Q_value,
                  sol->residual_norm, sol->state.grid().size(), sol->note};
      if (halvings > 0)
      {
        row.note += (row.note.empty() ? "" : "; ") + std::to_string(halvings) + " step halvings";
      }
      rows.push_back(row);
      if (solutions)
      {
        solutions->push_back(std::move(*sol));
      }
    }
    else
    {
      const double nan = std::nan("");
      rows.push_back({target, false, nan, nan, nan, nan, nan, at.state.grid().size(),
                      "continuation step below floor at beta " + std::to_string(at.beta)});
      if (solutions)
      {
        Solution failed = evaluate_solution(params, at.state, at.lambda1, at.lambda2);
        failed.converged = false;
        failed.note = rows.back().note;
        solutions->push_back(std::move(failed));
      }
    }
  }
  return rows;
}

}  // namespace nlsnorm
