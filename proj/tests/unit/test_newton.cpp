#include <doctest.h>

#include <cmath>
#include <random>

#include "nlsnorm/decoupled.hpp"
#include "nlsnorm/errors.hpp"
#include "nlsnorm/newton.hpp"

using namespace nlsnorm;

namespace
{

SystemParams supercritical(double beta)
{
  return {3, 4.0, 4.0, 2.0, 2.0, 1.0, 1.0, beta, 1.0, 1.0};
}

void check_accepted(const SystemParams &pm, const Solution &s, double tol)
{
  REQUIRE(s.converged);
  CHECK(std::abs(mass(s.state.u1) - pm.a1) <= 1e-10 * pm.a1);
  CHECK(std::abs(mass(s.state.u2) - pm.a2) <= 1e-10 * pm.a2);
  CHECK(s.lambda1 < 0.0);
  CHECK(s.lambda2 < 0.0);
  CHECK(interior_min(s.state) > 0.0);
  CHECK(std::abs(s.Q_value) <= 1e-4 * std::max(1.0, std::abs(s.J_value)));
  const auto res = gradient_residual(pm, s.state, s.lambda1, s.lambda2);
  CHECK(l2_norm(res.first) <= tol * component_scale(s.lambda1, pm.a1));
  CHECK(l2_norm(res.second) <= tol * component_scale(s.lambda2, pm.a2));
}

std::vector<double> positive_state(const KKTSystem &sys, const GridPtr &g, std::mt19937_64 &rng)
{
  std::uniform_real_distribution<double> u(0.5, 1.5);
  const double a = u(rng), b = u(rng), c = u(rng);
  const auto f1 = RadialField::from_function(g, [&](double r) { return a * std::exp(-0.3 * r * r) + 0.1; });
  const auto f2 = RadialField::from_function(g, [&](double r) { return b / (1.0 + c * r * r) + 0.05; });
  return sys.pack(State(f1, f2), -0.7, -1.1);
}

}  // namespace

TEST_CASE("Jacobian matches finite differences of the residual")
{
  auto g = RadialGrid::uniform(3, 128, 6.0);
  std::mt19937_64 rng(41);
  // Integer and fractional coupling powers.
  for (const SystemParams pm : {supercritical(0.7), SystemParams{3, 2.5, 4.0, 1.5, 2.5, 1.0, 1.3, 0.8, 2.0, 1.0}})
  {
    const KKTSystem sys(pm, g);
    const auto x = positive_state(sys, g, rng);
    std::vector<double> v(x.size());
    std::normal_distribution<double> nd;
    for (double &e : v)
    {
      e = nd(rng);
    }
    std::vector<double> Jv(x.size(), 0.0);
    for (const auto &e : sys.jacobian(x))
    {
      Jv[e.row] += e.value * v[e.col];
    }
    const double h = 1e-6;
    auto xp = x, xm = x;
    for (std::size_t k = 0; k < x.size(); ++k)
    {
      xp[k] += h * v[k];
      xm[k] -= h * v[k];
    }
    const auto Fp = sys.residual(xp), Fm = sys.residual(xm);
    double err = 0.0, ref = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k)
    {
      const double fd = (Fp[k] - Fm[k]) / (2.0 * h);
      err = std::max(err, std::abs(fd - Jv[k]));
      ref = std::max(ref, std::abs(Jv[k]));
    }
    CHECK(err <= 1e-6 * ref);
  }
}

TEST_CASE("banded bordered solve agrees with sparse LU")
{
  auto g = RadialGrid::uniform(3, 256, 8.0);
  std::mt19937_64 rng(43);
  const auto pm = supercritical(0.3);
  for (int frozen : {-1, 0, 1})
  {
    const KKTSystem sys(pm, g, frozen);
    const auto x = positive_state(sys, g, rng);
    const auto F = sys.residual(x);
    const auto banded = sys.newton_step(x, F);
    const auto sparse = sys.sparse_step(x, F);
    REQUIRE(banded.ok);
    REQUIRE(sparse.ok);
    CHECK_FALSE(banded.fallback);
    double err = 0.0, ref = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k)
    {
      err = std::max(err, std::abs(banded.step[k] - sparse.step[k]));
      ref = std::max(ref, std::abs(sparse.step[k]));
    }
    CHECK(err <= 1e-9 * ref);
    if (frozen >= 0)
    {
      CHECK(banded.step[2 * sys.nodes() + static_cast<std::size_t>(frozen)] == 0.0);
      CHECK(banded.step[2 * 7 + static_cast<std::size_t>(frozen)] == 0.0);
    }
  }
}

TEST_CASE("exact decoupled pair is a root")
{
  const auto pm = supercritical(0.0);
  const auto pair = decoupled_pair(pm);
  const auto s = newton_refine(pm, pair.state, -pair.lambda1, -pair.lambda2);
  check_accepted(pm, s, 1e-8);
  CHECK(s.iterations <= 3);
  CHECK(std::abs(s.J_value - pair.level()) <= 1e-4);
  CHECK(std::abs(s.lambda1 + pair.lambda1) <= 1e-6 * pair.lambda1);
}

TEST_CASE("symmetric supercritical coupling")
{
  // u1 = u2 solves the scalar problem with μ + 2β, so λ and J scale as
  // (1 + 2β)^{-2} from their β = 0 values.
  const auto pair = decoupled_pair(supercritical(0.0));
  const double beta = 0.05;
  const auto pm = supercritical(beta);
  const auto s = newton_refine(pm, pair.state);
  check_accepted(pm, s, 1e-8);
  const double f = (1.0 + 2.0 * beta) * (1.0 + 2.0 * beta);
  CHECK(s.lambda1 == doctest::Approx(-pair.lambda1 / f).epsilon(1e-6));
  CHECK(s.lambda2 == doctest::Approx(-pair.lambda2 / f).epsilon(1e-6));
  CHECK(s.J_value == doctest::Approx(pair.level() / f).epsilon(1e-6));

  // Quadratic tail of the merit history.
  REQUIRE(s.history.size() >= 4);
  for (double q : quadratic_tail(s))
  {
    CHECK(q <= 10.0);
  }
}

TEST_CASE("Newton rejects sign-changing and invalid input")
{
  const auto pm = supercritical(0.05);
  const auto pair = decoupled_pair(supercritical(0.0));
  // A node in u1 persists under Newton: an excited state is not accepted.
  const auto &g = pair.state.grid_ptr();
  const double k = std::sqrt(pair.lambda1);
  const auto bad = RadialField::from_function(
    g, [&](double r) { return std::exp(-k * r) * (1.0 - 0.5 * k * r); });
  const auto s = newton_refine(pm, State(bad, pair.state.u2));
  CHECK_FALSE(s.converged);
  CHECK_FALSE(s.note.empty());

  NewtonOptions o;
  o.frozen = 2;
  CHECK_THROWS_AS(o.validate(), ConfigError);
  o = {};
  o.tol = 0.0;
  CHECK_THROWS_AS(newton_refine(pm, pair.state, o), ConfigError);
  SystemParams crit = pm;
  crit.p1 = 10.0 / 3.0;
  CHECK_THROWS_AS(newton_refine(crit, pair.state), RegimeError);
}

TEST_CASE("frozen component stays fixed")
{
  const auto pm = supercritical(0.05);
  const auto pair = decoupled_pair(supercritical(0.0));
  NewtonOptions o;
  o.frozen = 0;
  const auto s = newton_refine(pm, pair.state, o);
  REQUIRE(s.converged);
  for (std::size_t i = 0; i < s.state.u1.size(); ++i)
  {
    REQUIRE(s.state.u1[i] == doctest::Approx(pair.state.u1[i]).epsilon(1e-12));
  }
  // The free component solves its own equation.
  const auto res = gradient_residual(pm, s.state, s.lambda1, s.lambda2);
  CHECK(l2_norm(res.second) <= 1e-8 * component_scale(s.lambda2, pm.a2));
}
