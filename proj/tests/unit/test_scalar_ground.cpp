#include <doctest.h>

#include <cmath>

#include "../oracles/petviashvili.hpp"
#include "nlsnorm/errors.hpp"
#include "nlsnorm/scalar_ground.hpp"

using namespace nlsnorm;

TEST_CASE("problem validation")
{
  CHECK_THROWS_AS(ScalarProblem(3, 10.0 / 3.0, 1.0), RegimeError);
  CHECK_THROWS_AS(ScalarProblem(3, 6.0, 1.0), ConfigError);
  CHECK_THROWS_AS(ScalarProblem(3, 2.0, 1.0), ConfigError);
  CHECK_THROWS_AS(ScalarProblem(3, 3.0, 0.0), ConfigError);
  CHECK_NOTHROW(ScalarProblem(2, 12.0, 1.0));
}

TEST_CASE("one-dimensional solitons")
{
  auto g = RadialGrid::uniform(1, 4096, 20.0);
  const auto quartic = solve_unit_ground(ScalarProblem(1, 4.0, 1.0), g);
  CHECK(std::abs(quartic.shoot_value - std::sqrt(2.0)) <= 1e-6);
  CHECK(std::abs(quartic.mass_w - 4.0) <= 1e-5);
  CHECK(std::abs(quartic.grad_w - 4.0 / 3.0) <= 1e-5);
  CHECK(std::abs(quartic.plevel_w - 16.0 / 3.0) <= 1e-5);

  const auto cubic = solve_unit_ground(ScalarProblem(1, 3.0, 1.0), g);
  CHECK(std::abs(cubic.shoot_value - 1.5) <= 1e-6);
  CHECK(std::abs(cubic.mass_w - 6.0) <= 1e-5);
  for (std::size_t i = 0; i < g->size(); i += 97)
  {
    const double x = g->nodes()[i];
    const double exact = 1.5 / std::pow(std::cosh(x / 2.0), 2);
    CHECK(std::abs(cubic.w[i] - exact) <= 1e-8);
  }
}

TEST_CASE("three-dimensional cubic ground state against the relaxation oracle")
{
  auto g = RadialGrid::uniform(3, 4096, 20.0);
  const auto gs = solve_unit_ground(ScalarProblem(3, 3.0, 1.0), g);
  // Second-order oracle at two resolutions, Richardson-extrapolated.
  const auto coarse = oracle::petviashvili_3d(3.0, 8191, 30.0);
  const auto fine = oracle::petviashvili_3d(3.0, 16383, 30.0);
  const double extrapolated = (4.0 * fine.mass - coarse.mass) / 3.0;
  CHECK(std::abs(gs.mass_w / extrapolated - 1.0) <= 1e-4);
  CHECK(std::abs(gs.mass_w / fine.mass - 1.0) <= 1e-4);
  CHECK(std::abs(gs.shoot_value - fine.w0) <= 1e-3);
}

TEST_CASE("ground state invariants")
{
  for (double p : {2.5, 3.0, 4.0})
  {
    auto g = RadialGrid::uniform(3, 4096, 20.0);
    const ScalarProblem pb(3, p, 1.0);
    const auto gs = solve_unit_ground(pb, g);
    const double pair = gs.grad_w + gs.mass_w;
    CHECK(std::abs(pair - gs.plevel_w) <= 1e-9 * pair);
    // Scalar Pohozaev identity.
    CHECK(std::abs(gs.grad_w - 3.0 * (p - 2.0) / (2.0 * p) * gs.plevel_w) <= 1e-9 * gs.grad_w);

    for (std::size_t i = 1; i + 1 < g->size(); ++i)
    {
      REQUIRE(gs.w[i] > 0.0);
      REQUIRE(gs.w[i] < gs.w[i - 1]);
    }
    // Discrete residual of -Δw + w - w^{p-1}, weighted L^2, away from the
    // rows that see the forced zero at r_max.
    const auto lw = apply_laplacian(gs.w);
    std::vector<double> res(g->size(), 0.0);
    for (std::size_t i = 0; i + 3 < g->size(); ++i)
    {
      res[i] = lw[i] + gs.w[i] - std::pow(gs.w[i], p - 1.0);
    }
    CHECK(l2_norm(RadialField(g, res)) <= 1e-6);

    // Uniqueness surrogate: different starting brackets, same root.
    for (double guess : {1.5, 7.0, 40.0})
    {
      ShootOptions opts;
      opts.initial_guess = guess;
      const auto other = solve_unit_ground(pb, g, 1e-10, opts);
      CHECK(std::abs(other.shoot_value - gs.shoot_value) <= 1e-8);
    }
  }
}

TEST_CASE("coupling constant enters by scaling")
{
  // w_mu = mu^{-1/(p-2)} w_1.
  auto g = RadialGrid::uniform(3, 4096, 20.0);
  const auto one = solve_unit_ground(ScalarProblem(3, 3.0, 1.0), g);
  const auto two = solve_unit_ground(ScalarProblem(3, 3.0, 2.0), g);
  CHECK(std::abs(two.shoot_value - one.shoot_value / 2.0) <= 1e-9);
  CHECK(std::abs(two.mass_w - one.mass_w / 4.0) <= 1e-8 * one.mass_w);
}

TEST_CASE("rescaling to a prescribed mass")
{
  auto g1 = RadialGrid::uniform(1, 4096, 20.0);
  const auto soliton = solve_unit_ground(ScalarProblem(1, 4.0, 1.0), g1);
  CHECK(rescaled_lambda(soliton, soliton.mass_w) == doctest::Approx(1.0).epsilon(1e-15));
  const auto r8 = rescale_to_mass(soliton, 8.0);
  CHECK(std::abs(r8.lambda - 4.0) <= 1e-8);
  CHECK(std::abs(mass(r8.u) - 8.0) <= 1e-5);

  // Identity case reproduces w.
  const auto same = rescale_to_mass(soliton, soliton.mass_w, g1);
  for (std::size_t i = 0; i < g1->size(); ++i)
  {
    REQUIRE(std::abs(same.u[i] - soliton.w[i]) <= 1e-14);
  }

  auto g3 = RadialGrid::uniform(3, 4096, 20.0);
  const auto cubic = solve_unit_ground(ScalarProblem(3, 3.0, 1.0), g3);
  const auto twice = rescale_to_mass(cubic, 2.0 * cubic.mass_w);
  CHECK(std::abs(twice.lambda - 4.0) <= 1e-12);
  CHECK(std::abs(mass(twice.u) / (2.0 * cubic.mass_w) - 1.0) <= 1e-4);

  // A small mass spreads u_a far beyond the default grid.
  CHECK_THROWS_AS(rescale_to_mass(cubic, 1.0, g3), ResolutionError);
  CHECK_NOTHROW(rescale_to_mass(cubic, 1.0));
  CHECK_THROWS_AS(rescale_to_mass(cubic, -1.0), ConfigError);
}

TEST_CASE("ground level and its scaling law")
{
  auto g1 = RadialGrid::uniform(1, 4096, 20.0);
  const auto soliton = solve_unit_ground(ScalarProblem(1, 4.0, 1.0), g1);
  CHECK(std::abs(ground_level(soliton, 4.0) + 2.0 / 3.0) <= 1e-5);
  CHECK(ground_level(soliton, soliton.mass_w) == soliton.unit_level());

  for (double p : {3.0, 4.0})
  {
    auto g = RadialGrid::uniform(3, 4096, 20.0);
    const auto gs = solve_unit_ground(ScalarProblem(3, p, 1.0), g);
    const double kappa = (2.0 * p - 3.0 * (p - 2.0)) / (4.0 - 3.0 * (p - 2.0));
    const double masses[] = {0.5, 1.0, 2.0, 4.0};
    for (int k = 0; k + 1 < 4; ++k)
    {
      const double slope = std::log(std::abs(ground_level(gs, masses[k + 1]) /
                                             ground_level(gs, masses[k]))) /
                           std::log(masses[k + 1] / masses[k]);
      CHECK(std::abs(slope - kappa) <= 1e-3);
    }

    // Grid-level fiber stationarity of u_a.
    const auto ua = rescale_to_mass(gs, 2.0);
    const double G = grad_norm_sq(ua.u);
    const double P = lp_norm_pow(ua.u, p);
    const double dI = G - 3.0 * (p - 2.0) / (2.0 * p) * P;
    CHECK(std::abs(dI) <= 1e-6 * G);
  }
}

TEST_CASE("level curve")
{
  auto g = RadialGrid::uniform(3, 4096, 20.0);
  const std::vector<double> masses = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  const auto sub = level_curve(ScalarProblem(3, 3.0, 1.0), g, masses);
  const auto sup = level_curve(ScalarProblem(3, 4.0, 1.0), g, masses);
  for (std::size_t i = 0; i < masses.size(); ++i)
  {
    CHECK(sub[i].m < 0.0);
    CHECK(sup[i].m > 0.0);
    if (i > 0)
    {
      CHECK(sub[i].m < sub[i - 1].m);
      CHECK(sup[i].m < sup[i - 1].m);
    }
  }
  CHECK_THROWS_AS(level_curve(ScalarProblem(3, 3.0, 1.0), g, {2.0, 1.0}), ConfigError);
}
