#include "nlsnorm/check_suite.hpp"

#include <cmath>
#include <random>

#include "nlsnorm/decoupled.hpp"
#include "nlsnorm/energy.hpp"
#include "nlsnorm/newton.hpp"
#include "nlsnorm/scalar_ground.hpp"

namespace nlsnorm
{

namespace
{

struct Suite
{
  CheckHooks hooks;
  std::vector<CheckEntry> entries;

  void add(std::string name, double measured, double tol, std::string note = "")
  {
    const bool ok = std::isfinite(measured) && measured <= tol;
    entries.push_back({std::move(name), measured, tol, ok, std::move(note)});
  }

  Norms hooked(Norms n) const
  {
    const double f = hooks.factor;
    const std::string &k = hooks.scale_norm;
    if (k == "grad1") n.grad1 *= f;
    else if (k == "grad2") n.grad2 *= f;
    else if (k == "pow1") n.pow1 *= f;
    else if (k == "pow2") n.pow2 *= f;
    else if (k == "mixed") n.mixed *= f;
    else if (k == "mass1") n.mass1 *= f;
    else if (k == "mass2") n.mass2 *= f;
    return n;
  }
};

double rel(double x, double ref)
{
  return std::abs(x - ref) / std::max(std::abs(ref), 1e-300);
}

// Same family as the unit tests: a centred bump plus a shell.
RadialField random_field(const GridPtr &g, std::mt19937_64 &rng)
{
  std::uniform_real_distribution<double> radius(3.0, 7.0), amp(0.5, 2.0), centre(2.5, 4.0),
    width(1.0, 2.0);
  const double R = radius(rng), A = amp(rng), c = centre(rng), w = width(rng), B = amp(rng);
  return RadialField::from_function(g, [=](double r)
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

RadialField shifted(const RadialField &u, double e, const RadialField &phi)
{
  std::vector<double> v = u.data();
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    v[i] += e * phi[i];
  }
  return RadialField(u.grid_ptr(), std::move(v));
}

RadialField on_sphere(const RadialField &u, double a)
{
  return u.scaled(std::sqrt(a / mass(u)));
}

SystemParams mixed_example()
{
  return {3, 2.5, 4.0, 1.5, 2.5, 1.0, 1.0, 1.0, 1.0, 1.0};
}

SystemParams subcritical_example()
{
  return {3, 2.5, 2.5, 1.2, 1.2, 1.0, 1.0, 1.0, 1.0, 1.0};
}

void quick_checks(Suite &s, std::mt19937_64 &rng)
{
  auto g = RadialGrid::uniform(3, 4096, 20.0);
  const auto pm = mixed_example();
  const int N = pm.dim;
  std::uniform_real_distribution<double> sdist(-1.0, 1.0);

  double e_mass = 0, e_grad = 0, e_pow = 0, e_mixed = 0;
  for (int k = 0; k < 20; ++k)
  {
    const State st(random_field(g, rng), random_field(g, rng));
    const double sd = sdist(rng);
    const Norms n = s.hooked(compute_norms(pm, st));
    const State ds(dilate(st.u1, sd), dilate(st.u2, sd));
    const Norms m = compute_norms(pm, ds);
    e_mass = std::max(e_mass, rel(m.mass1, n.mass1));
    e_grad = std::max(e_grad, rel(m.grad1, std::exp(2 * sd) * n.grad1));
    e_pow = std::max(e_pow, rel(m.pow2, std::exp(sd * N * (pm.p2 - 2) / 2) * n.pow2));
    e_mixed = std::max(e_mixed, rel(m.mixed, std::exp(sd * (N * (pm.r1 + pm.r2) / 2 - N)) * n.mixed));
  }
  s.add("dilation.mass_invariance", e_mass, 1e-6, "20 states, |s| <= 1");
  s.add("dilation.gradient_law", e_grad, 1e-6);
  s.add("dilation.power_law", e_pow, 1e-6);
  s.add("dilation.mixed_law", e_mixed, 1e-6);

  // dJ(s*u)/ds at 0 against Q from cached norms.
  double e_fiber = 0;
  for (int k = 0; k < 10; ++k)
  {
    const State st(on_sphere(random_field(g, rng), pm.a1), on_sphere(random_field(g, rng), pm.a2));
    const Norms n = compute_norms(pm, st);
    const double d = 1e-3;
    const auto f = fiber_profile(pm, n, {-2 * d, -d, d, 2 * d});
    const double fd = (f[0].J - 8 * f[1].J + 8 * f[2].J - f[3].J) / (12 * d);
    const double Q = pohozaev_Q(pm, s.hooked(n));
    e_fiber = std::max(e_fiber, std::abs(fd - Q) / std::max(1.0, std::abs(Q)));
  }
  s.add("fiber.identity_exact_scaling", e_fiber, 1e-8, "five-point difference, step 1e-3");

  {
    SystemParams p0 = pm;
    p0.beta = 0.0;
    const State st(random_field(g, rng), random_field(g, rng));
    const Norms n = s.hooked(compute_norms(p0, st));
    const double I1 = 0.5 * n.grad1 - p0.mu1 / p0.p1 * n.pow1;
    const double I2 = 0.5 * n.grad2 - p0.mu2 / p0.p2 * n.pow2;
    s.add("decoupling.additive_J", rel(energy_J(p0, st), I1 + I2), 1e-14);
  }
  {
    const State st(random_field(g, rng), random_field(g, rng));
    const State sw(st.u2, st.u1);
    s.add("symmetry.label_swap_J", rel(energy_J(pm, st), energy_J(pm.swapped(), sw)), 1e-14);
    s.add("symmetry.label_swap_Q", rel(pohozaev_Q(pm, st), pohozaev_Q(pm.swapped(), sw)), 1e-14);
  }
  {
    const State zero(RadialField::zeros(g), RadialField::zeros(g));
    s.add("zero_state.J_and_Q", std::abs(energy_J(pm, zero)) + std::abs(pohozaev_Q(pm, zero)), 0.0);
  }
}

void full_checks(Suite &s, std::mt19937_64 &rng)
{
  // Closed-form one-dimensional solitons.
  {
    auto g = RadialGrid::uniform(1, 4096, 20.0);
    const auto q = solve_unit_ground(ScalarProblem(1, 4.0, 1.0), g);
    s.add("scalar.soliton_p4_shoot", std::abs(q.shoot_value - std::sqrt(2.0)), 1e-6);
    s.add("scalar.soliton_p4_mass", std::abs(q.mass_w - 4.0), 1e-5);
    const auto c = solve_unit_ground(ScalarProblem(1, 3.0, 1.0), g);
    s.add("scalar.soliton_p3_shoot", std::abs(c.shoot_value - 1.5), 1e-6);
    s.add("scalar.soliton_p3_mass", std::abs(c.mass_w - 6.0), 1e-5);
  }

  // Mass rescaling and the power law of the level.
  {
    const ScalarProblem pb(3, 3.0, 1.0);
    auto g = RadialGrid::uniform(3, 4096, 20.0);
    const auto gs = solve_unit_ground(pb, g);
    const std::vector<double> a{0.5, 1.0, 2.0, 4.0};
    double e_mass = 0;
    std::vector<double> logm;
    for (double ai : a)
    {
      const auto u = rescale_to_mass(gs, ai);
      e_mass = std::max(e_mass, std::abs(mass(u.u) - ai));
      logm.push_back(std::log(std::abs(ground_level(gs, ai))));
    }
    const double kappa = (2 * pb.p - pb.dim * (pb.p - 2)) / (4 - pb.dim * (pb.p - 2));
    double e_slope = 0;
    for (std::size_t i = 1; i < a.size(); ++i)
    {
      e_slope = std::max(e_slope, std::abs((logm[i] - logm[i - 1]) / std::log(a[i] / a[i - 1]) - kappa));
    }
    s.add("scalar.rescaled_mass", e_mass, 1e-4, "N=3, p=3, a in {1/2, 1, 2, 4}");
    s.add("scalar.level_slope", e_slope, 1e-3);
  }

  auto g = RadialGrid::uniform(3, 4096, 20.0);
  const auto pm = mixed_example();

  // Fiber derivative through resampled dilations.
  {
    double e = 0;
    for (int k = 0; k < 10; ++k)
    {
      const State st(on_sphere(random_field(g, rng), pm.a1), on_sphere(random_field(g, rng), pm.a2));
      const double d = 1e-2;
      const auto J = [&](double t) { return energy_J(pm, State(dilate(st.u1, t), dilate(st.u2, t))); };
      const double fd = (J(-2 * d) - 8 * J(-d) + 8 * J(d) - J(2 * d)) / (12 * d);
      const double Q = pohozaev_Q(pm, s.hooked(compute_norms(pm, st)));
      e = std::max(e, std::abs(fd - Q) / std::max(1.0, std::abs(Q)));
    }
    s.add("fiber.identity_resampled", e, 1e-6, "five-point difference, step 1e-2");
  }

  // Residual as the constrained first variation.
  {
    const State st(random_field(g, rng), random_field(g, rng));
    const auto phi1 = random_field(g, rng), phi2 = random_field(g, rng);
    const double l1 = -0.7, l2 = -1.3;
    const auto [R1, R2] = gradient_residual(pm, st, l1, l2);
    const auto L = [&](double e)
    {
      const State t(shifted(st.u1, e, phi1), shifted(st.u2, e, phi2));
      const auto n = compute_norms(pm, t);
      return energy_J(pm, n) - 0.5 * l1 * n.mass1 - 0.5 * l2 * n.mass2;
    };
    const double e = 1e-4;
    const double exact = inner(R1, phi1) + inner(R2, phi2);
    s.add("energy.residual_gradient", std::abs((L(e) - L(-e)) / (2 * e) - exact) / std::max(1.0, std::abs(exact)), 1e-6);
  }

  // GN quotient never exceeds the sharp constant.
  {
    auto gg = RadialGrid::uniform(3, 4096, 20.0);
    const double C = gn_constant(3, 4.0, gg);
    double worst = -1e300;
    for (int k = 0; k < 20; ++k)
    {
      worst = std::max(worst, gn_quotient(random_field(gg, rng), 4.0) - C);
    }
    s.add("gn.quotient_below_constant", worst, 1e-10, "20 fields, N=3, p=4");
  }

  // Decoupled pairs: multipliers and the Newton root.
  {
    SystemParams p0 = subcritical_example();
    p0.beta = 0.0;
    const auto pair = decoupled_pair(p0);
    const auto lam = lagrange_multipliers(p0, s.hooked(compute_norms(p0, pair.state)));
    s.add("multipliers.decoupled_pair",
          std::max(rel(lam.lambda1, -pair.lambda1), rel(lam.lambda2, -pair.lambda2)), 1e-5);
    const SystemParams sup{3, 4.0, 4.0, 2.0, 2.0, 1.0, 1.0, 0.0, 1.0, 1.0};
    const auto sp = decoupled_pair(sup);
    const auto sol = newton_refine(sup, sp.state, -sp.lambda1, -sp.lambda2);
    s.add("newton.decoupled_root", sol.converged ? std::abs(sol.J_value - sp.level()) : INFINITY, 1e-4,
          "iterations " + std::to_string(sol.iterations));
  }
}

}  // namespace

bool CheckReport::passed() const
{
  for (const auto &e : entries)
  {
    if (!e.passed)
    {
      return false;
    }
  }
  return true;
}

nlohmann::json CheckReport::to_json() const
{
  nlohmann::json list = nlohmann::json::array();
  for (const auto &e : entries)
  {
    list.push_back({{"name", e.name}, {"measured", e.measured}, {"tolerance", e.tolerance},
                    {"passed", e.passed}, {"note", e.note}});
  }
  return {{"level", level}, {"seed", seed}, {"passed", passed()}, {"checks", list}};
}

CheckReport check_suite(bool full, std::uint64_t seed, const CheckHooks &hooks)
{
  Suite s{hooks, {}};
  std::mt19937_64 rng(seed);
  quick_checks(s, rng);
  if (full)
  {
    full_checks(s, rng);
  }
  return {full ? "full" : "quick", seed, std::move(s.entries)};
}

}  // namespace nlsnorm
