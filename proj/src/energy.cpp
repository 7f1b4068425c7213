#include "nlsnorm/energy.hpp"

#include <cmath>
#include <limits>

#include "nlsnorm/errors.hpp"
#include "nlsnorm/kernels.hpp"
#include "nlsnorm/scalar_ground.hpp"

namespace nlsnorm
{

double SystemParams::sobolev_exponent() const
{
  return dim <= 2 ? std::numeric_limits<double>::infinity() : 2.0 * dim / (dim - 2.0);
}

void SystemParams::validate() const
{
  const auto fail = [](const std::string &m) { throw ConfigError(m); };
  if (dim < 1)
  {
    fail("N must be >= 1");
  }
  const double ss = sobolev_exponent();
  for (double p : {p1, p2})
  {
    if (!(p > 2.0 && p < ss))
    {
      fail("p_i must lie in (2, 2N/(N-2))");
    }
  }
  if (!(r1 > 0.0 && r2 > 0.0))
  {
    fail("r_1, r_2 must be positive");
  }
  if (!(r1 + r2 >= 2.0 && r1 + r2 < ss))
  {
    fail("r_1 + r_2 must lie in [2, 2N/(N-2))");
  }
  if (!(mu1 > 0.0 && mu2 > 0.0))
  {
    fail("mu_1, mu_2 must be positive");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta))
  {
    fail("beta must be >= 0");
  }
  if (!(a1 > 0.0 && a2 > 0.0) || !std::isfinite(a1) || !std::isfinite(a2))
  {
    fail("masses must be positive");
  }
}

SystemParams SystemParams::swapped() const
{
  SystemParams s = *this;
  std::swap(s.p1, s.p2);
  std::swap(s.r1, s.r2);
  std::swap(s.mu1, s.mu2);
  std::swap(s.a1, s.a2);
  return s;
}

std::string to_string(RegimeTag tag)
{
  switch (tag)
  {
    case RegimeTag::SubcriticalMin: return "SubcriticalMin";
    case RegimeTag::SubcriticalMinHighDim: return "SubcriticalMinHighDim";
    case RegimeTag::Mixed: return "Mixed";
    case RegimeTag::Supercritical: return "Supercritical";
    case RegimeTag::CriticalUnsupported: return "CriticalUnsupported";
    case RegimeTag::Unclassified: return "Unclassified";
  }
  return "Unclassified";
}

Regime classify_regime(const SystemParams &pm)
{
  const double crit = pm.critical_exponent();
  const double r = pm.r1 + pm.r2;
  const auto eq = [crit](double x) { return std::abs(x - crit) <= 1e-12; };
  if (eq(pm.p1) || eq(pm.p2) || eq(r))
  {
    return {RegimeTag::CriticalUnsupported, false, "an exponent equals 2 + 4/N"};
  }
  const bool low_dim = pm.dim >= 2 && pm.dim <= 4;
  if (pm.p1 < crit && pm.p2 < crit && r < crit)
  {
    if (pm.dim >= 5)
    {
      const double bound = 2.0 + 2.0 / (pm.dim - 2.0);
      const bool exp = !(pm.p1 < bound && pm.p2 < bound);
      return {RegimeTag::SubcriticalMinHighDim, exp,
              exp ? "p_i between 2 + 2/(N-2) and 2 + 4/N: existence not known" : ""};
    }
    return {RegimeTag::SubcriticalMin, !low_dim, low_dim ? "" : "N = 1 is a test configuration"};
  }
  if (pm.p1 < crit && crit < pm.p2 && r > crit && pm.r2 > 2.0)
  {
    return {RegimeTag::Mixed, !low_dim, low_dim ? "" : "existence shown only for 2 <= N <= 4"};
  }
  if (pm.p1 > crit && pm.p2 > crit && r > crit)
  {
    return {RegimeTag::Supercritical, !low_dim,
            low_dim ? "" : "existence shown only for 2 <= N <= 4"};
  }
  return {RegimeTag::Unclassified, true, "exponents match none of the supported hypothesis sets"};
}

State::State(RadialField a, RadialField b) : u1(std::move(a)), u2(std::move(b))
{
  if (!u1.grid().same_as(u2.grid()))
  {
    throw StructuralError("state components live on different grids");
  }
}

Norms compute_norms(const SystemParams &pm, const State &st)
{
  Norms n;
  n.grad1 = grad_norm_sq(st.u1);
  n.grad2 = grad_norm_sq(st.u2);
  n.pow1 = lp_norm_pow(st.u1, pm.p1);
  n.pow2 = lp_norm_pow(st.u2, pm.p2);
  n.mixed = mixed_term(st.u1, st.u2, pm.r1, pm.r2);
  n.mass1 = mass(st.u1);
  n.mass2 = mass(st.u2);
  return n;
}

double energy_J(const SystemParams &pm, const Norms &n)
{
  return 0.5 * (n.grad1 + n.grad2) - pm.mu1 / pm.p1 * n.pow1 - pm.mu2 / pm.p2 * n.pow2 -
         pm.beta * n.mixed;
}

double energy_J(const SystemParams &pm, const State &st)
{
  return energy_J(pm, compute_norms(pm, st));
}

double pohozaev_Q(const SystemParams &pm, const Norms &n)
{
  const double N = pm.dim;
  return n.grad1 + n.grad2 - pm.mu1 / pm.p1 * N * (pm.p1 / 2.0 - 1.0) * n.pow1 -
         pm.mu2 / pm.p2 * N * (pm.p2 / 2.0 - 1.0) * n.pow2 -
         N * pm.beta * ((pm.r1 + pm.r2) / 2.0 - 1.0) * n.mixed;
}

double pohozaev_Q(const SystemParams &pm, const State &st)
{
  return pohozaev_Q(pm, compute_norms(pm, st));
}

Multipliers lagrange_multipliers(const SystemParams &pm, const Norms &n)
{
  if (!(n.mass1 > 0.0) || !(n.mass2 > 0.0))
  {
    throw NumericError("lagrange_multipliers: a component has zero mass");
  }
  return {(n.grad1 - pm.mu1 * n.pow1 - pm.beta * pm.r1 * n.mixed) / n.mass1,
          (n.grad2 - pm.mu2 * n.pow2 - pm.beta * pm.r2 * n.mixed) / n.mass2};
}

Multipliers lagrange_multipliers(const SystemParams &pm, const State &st)
{
  return lagrange_multipliers(pm, compute_norms(pm, st));
}

std::pair<RadialField, RadialField> gradient_residual(const SystemParams &pm, const State &st,
                                                      double lambda1, double lambda2)
{
  using kernels::abs_pow;
  const RadialField l1 = apply_laplacian(st.u1);
  const RadialField l2 = apply_laplacian(st.u2);
  const std::size_t n = st.u1.size();
  std::vector<double> r1(n, 0.0), r2(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i)
  {
    const double a = st.u1[i];
    const double b = st.u2[i];
    const double sa = a < 0 ? -1.0 : 1.0;
    const double sb = b < 0 ? -1.0 : 1.0;
    r1[i] = l1[i] - lambda1 * a - pm.mu1 * sa * abs_pow(a, pm.p1 - 1.0) -
            pm.r1 * pm.beta * sa * abs_pow(a, pm.r1 - 1.0) * abs_pow(b, pm.r2);
    r2[i] = l2[i] - lambda2 * b - pm.mu2 * sb * abs_pow(b, pm.p2 - 1.0) -
            pm.r2 * pm.beta * sb * abs_pow(b, pm.r2 - 1.0) * abs_pow(a, pm.r1);
  }
  return {RadialField(st.grid_ptr(), std::move(r1)), RadialField(st.grid_ptr(), std::move(r2))};
}

double residual_norm(const std::pair<RadialField, RadialField> &res)
{
  return std::sqrt(mass(res.first) + mass(res.second));
}

std::vector<FiberRow> fiber_profile(const SystemParams &pm, const Norms &n,
                                    const std::vector<double> &s_values)
{
  std::vector<FiberRow> rows;
  rows.reserve(s_values.size());
  const double N = pm.dim;
  const double ep1 = N * (pm.p1 - 2.0) / 2.0;
  const double ep2 = N * (pm.p2 - 2.0) / 2.0;
  const double em = N * (pm.r1 + pm.r2 - 2.0) / 2.0;
  for (double s : s_values)
  {
    Norms d = n;
    d.grad1 *= std::exp(2.0 * s);
    d.grad2 *= std::exp(2.0 * s);
    d.pow1 *= std::exp(s * ep1);
    d.pow2 *= std::exp(s * ep2);
    d.mixed *= std::exp(s * em);
    rows.push_back({s, energy_J(pm, d), pohozaev_Q(pm, d)});
  }
  return rows;
}

std::vector<FiberRow> fiber_profile(const SystemParams &pm, const State &st,
                                    const std::vector<double> &s_values)
{
  return fiber_profile(pm, compute_norms(pm, st), s_values);
}

double gn_quotient(const RadialField &u, double p)
{
  const double alpha = u.grid().dim() * (p - 2.0) / (2.0 * p);
  const double lp = std::pow(lp_norm_pow(u, p), 1.0 / p);
  return lp / (std::pow(grad_norm_sq(u), alpha / 2.0) * std::pow(mass(u), (1.0 - alpha) / 2.0));
}

double gn_constant(int dim, double p, GridPtr grid)
{
  if (p == 2.0)
  {
    return 1.0;
  }
  const auto gs = solve_unit_ground(ScalarProblem::gn_optimizer(dim, p), std::move(grid));
  return gn_quotient(gs.w, p);
}

std::pair<double, double> admissible_q_interval(const SystemParams &pm)
{
  const double inf = std::numeric_limits<double>::infinity();
  const double ss = pm.sobolev_exponent();
  const double N = pm.dim;
  const double lower = std::max(2.0 / pm.r1, std::isinf(ss) ? 1.0 : ss / (ss - pm.r2));
  double upper = std::isinf(ss) ? inf : ss / pm.r1;
  if (pm.r2 < 2.0)
  {
    upper = std::min(upper, 2.0 / (2.0 - pm.r2));
  }
  const double den = 2.0 * N - pm.r2 * N + 4.0;
  if (den > 0.0)
  {
    upper = std::min(upper, 2.0 * N / den);
  }
  return {lower, upper};
}

Threshold::Threshold(const SystemParams &pm, GridPtr gn_grid) : params_(pm)
{
  if (classify_regime(pm).tag != RegimeTag::Mixed)
  {
    throw RegimeError("threshold c(u1) is defined in the mixed regime only");
  }
  const auto [lo, hi] = admissible_q_interval(pm);
  if (!(hi > lo))
  {
    throw RegimeError("empty admissible interval for q");
  }
  q_ = std::isinf(hi) ? 2.0 * lo : 0.5 * (lo + hi);
  qc_ = q_ / (q_ - 1.0);
  const double N = pm.dim;
  const double e2 = pm.r2 * qc_;
  gamma_ = N * (e2 - 2.0) / (2.0 * qc_);
  if (!(gamma_ > 2.0))
  {
    throw RegimeError("gamma <= 2 for the chosen q");
  }
  if (!gn_grid)
  {
    gn_grid = RadialGrid::uniform(pm.dim);
  }
  const double c_p2 = gn_constant(pm.dim, pm.p2, gn_grid);
  const double c_e2 = gn_constant(pm.dim, e2, gn_grid);
  K1_ = pm.mu2 / pm.p2 * std::pow(c_p2, pm.p2) * std::pow(2.0, N * (pm.p2 - 2.0) / 4.0) *
        std::pow(pm.a2, (pm.p2 - N * (pm.p2 - 2.0) / 2.0) / 2.0);
  const double alpha = N * (e2 - 2.0) / (2.0 * e2);
  K2_ = pm.beta * std::pow(c_e2, pm.r2) * std::pow(2.0, gamma_ / 2.0) *
        std::pow(pm.a2, pm.r2 * (1.0 - alpha) / 2.0);
  cap_ = std::pow(8.0 * K1_, -4.0 / (N * (pm.p2 - 2.0) - 4.0));
}

double Threshold::operator()(const RadialField &u1) const
{
  return from_norm_pow(lp_norm_pow(u1, norm_exponent()));
}

double Threshold::from_norm_pow(double lp_pow) const
{
  if (K2_ == 0.0)
  {
    return cap_;
  }
  const double norm = std::pow(lp_pow, 1.0 / norm_exponent());
  if (!(norm > 0.0))
  {
    return cap_;
  }
  const double second =
    std::pow(8.0 * K2_, -2.0 / (gamma_ - 2.0)) * std::pow(norm, -2.0 * params_.r1 / (gamma_ - 2.0));
  return std::min(cap_, second);
}

double threshold_c(const SystemParams &params, const RadialField &u1)
{
  return Threshold(params)(u1);
}

}  // namespace nlsnorm
