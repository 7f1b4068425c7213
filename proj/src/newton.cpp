#include "nlsnorm/newton.hpp"

#include <lapacke.h>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "nlsnorm/errors.hpp"
#include "nlsnorm/kernels.hpp"

namespace nlsnorm
{

using kernels::abs_pow;

namespace
{

double sgn(double x) { return x < 0.0 ? -1.0 : 1.0; }

struct Coeffs
{
  double p, r, mu, ro;
};

}  // namespace

KKTSystem::KKTSystem(const SystemParams &params, GridPtr grid, int frozen)
  : params_(params), grid_(std::move(grid)), m_(grid_->size() - 1), frozen_(frozen)
{
  if (frozen < -1 || frozen > 1)
  {
    throw ConfigError("KKT system: frozen component must be -1, 0 or 1");
  }
}

std::vector<double> KKTSystem::pack(const State &st, double l1, double l2) const
{
  if (!st.grid().same_as(*grid_))
  {
    throw StructuralError("KKT system and state use different grids");
  }
  std::vector<double> x(unknowns());
  for (std::size_t i = 0; i < m_; ++i)
  {
    x[2 * i] = st.u1[i];
    x[2 * i + 1] = st.u2[i];
  }
  x[2 * m_] = l1;
  x[2 * m_ + 1] = l2;
  return x;
}

State KKTSystem::unpack_state(const std::vector<double> &x) const
{
  std::vector<double> a(m_ + 1, 0.0), b(m_ + 1, 0.0);
  for (std::size_t i = 0; i < m_; ++i)
  {
    a[i] = x[2 * i];
    b[i] = x[2 * i + 1];
  }
  return State(RadialField(grid_, std::move(a)), RadialField(grid_, std::move(b)));
}

std::vector<double> KKTSystem::residual(const std::vector<double> &x) const
{
  const auto &st = grid_->stencil();
  const auto w = grid_->weights();
  const auto &pm = params_;
  std::vector<double> F(unknowns(), 0.0);
  const std::size_t n = m_ + 1;
  std::vector<double> u1(n, 0.0), u2(n, 0.0);
  for (std::size_t i = 0; i < m_; ++i)
  {
    u1[i] = x[2 * i];
    u2[i] = x[2 * i + 1];
  }
  const double l1 = x[2 * m_], l2 = x[2 * m_ + 1];
  double mass1 = 0.0, mass2 = 0.0;
#pragma omp parallel for schedule(static) if (m_ >= kernels::parallel_threshold)
  for (std::size_t i = 0; i < m_; ++i)
  {
    const double a = u1[i], b = u2[i];
    F[2 * i] = st.apply_row(i, u1.data()) - l1 * a - pm.mu1 * sgn(a) * abs_pow(a, pm.p1 - 1.0) -
               pm.r1 * pm.beta * sgn(a) * abs_pow(a, pm.r1 - 1.0) * abs_pow(b, pm.r2);
    F[2 * i + 1] = st.apply_row(i, u2.data()) - l2 * b -
                   pm.mu2 * sgn(b) * abs_pow(b, pm.p2 - 1.0) -
                   pm.r2 * pm.beta * sgn(b) * abs_pow(b, pm.r2 - 1.0) * abs_pow(a, pm.r1);
  }
  mass1 = kernels::weighted_dot(w, u1, u1);
  mass2 = kernels::weighted_dot(w, u2, u2);
  F[2 * m_] = 0.5 * (mass1 - pm.a1);
  F[2 * m_ + 1] = 0.5 * (mass2 - pm.a2);
  if (frozen_ >= 0)
  {
    for (std::size_t i = 0; i < m_; ++i)
    {
      F[2 * i + frozen_] = 0.0;
    }
    F[2 * m_ + frozen_] = 0.0;
  }
  return F;
}

double KKTSystem::merit(const std::vector<double> &F) const
{
  const auto w = grid_->weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < m_; ++i)
  {
    acc += w[i] * (F[2 * i] * F[2 * i] + F[2 * i + 1] * F[2 * i + 1]);
  }
  return std::sqrt(acc) + 2.0 * (std::abs(F[2 * m_]) + std::abs(F[2 * m_ + 1]));
}

std::vector<KKTSystem::Entry> KKTSystem::jacobian(const std::vector<double> &x) const
{
  const auto &st = grid_->stencil();
  const auto w = grid_->weights();
  const auto &pm = params_;
  std::vector<Entry> out;
  out.reserve(m_ * 16 + 4 * m_);
  const Coeffs c[2] = {{pm.p1, pm.r1, pm.mu1, pm.r2}, {pm.p2, pm.r2, pm.mu2, pm.r1}};
  for (std::size_t i = 0; i < m_; ++i)
  {
    const auto row = st.row(i);
    for (int k = 0; k < 2; ++k)
    {
      const std::size_t ri = 2 * i + k;
      if (k == frozen_)
      {
        out.push_back({ri, ri, 1.0});
        continue;
      }
      for (int e = 0; e < row.count; ++e)
      {
        if (row.cols[e] < m_)
        {
          out.push_back({ri, 2 * row.cols[e] + k, row.coefs[e]});
        }
      }
      const double uk = x[2 * i + k];
      const double uo = x[2 * i + 1 - k];
      const double lam = x[2 * m_ + k];
      const auto &ck = c[k];
      const double diag = -lam - ck.mu * (ck.p - 1.0) * abs_pow(uk, ck.p - 2.0) -
                          pm.beta * ck.r * (ck.r - 1.0) * abs_pow(uk, ck.r - 2.0) *
                            abs_pow(uo, ck.ro);
      out.push_back({ri, ri, diag});
      const double off = -pm.beta * ck.r * ck.ro * sgn(uk) * abs_pow(uk, ck.r - 1.0) * sgn(uo) *
                         abs_pow(uo, ck.ro - 1.0);
      out.push_back({ri, 2 * i + 1 - k, off});
      out.push_back({ri, 2 * m_ + k, -uk});
      out.push_back({2 * m_ + k, ri, w[i] * uk});
    }
  }
  if (frozen_ >= 0)
  {
    const std::size_t r = 2 * m_ + static_cast<std::size_t>(frozen_);
    out.push_back({r, r, 1.0});
  }
  return out;
}

KKTSystem::StepResult KKTSystem::newton_step(const std::vector<double> &x,
                                             const std::vector<double> &F) const
{
  const lapack_int n = static_cast<lapack_int>(2 * m_);
  const int kl = bandwidth, ku = bandwidth;
  const lapack_int ldab = 2 * kl + ku + 1;
  std::vector<double> ab(static_cast<std::size_t>(ldab) * n, 0.0);
  // Right-hand sides: -F, and the two border columns.
  std::vector<double> rhs(static_cast<std::size_t>(n) * 3, 0.0);
  std::vector<double> border_row[2] = {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  double corner[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  for (const auto &e : jacobian(x))
  {
    const auto r = static_cast<lapack_int>(e.row);
    const auto col = static_cast<lapack_int>(e.col);
    if (r < n && col < n)
    {
      ab[static_cast<std::size_t>(kl + ku + r - col) + static_cast<std::size_t>(col) * ldab] +=
        e.value;
    }
    else if (r < n)
    {
      rhs[static_cast<std::size_t>(n) * (1 + (col - n)) + r] = e.value;
    }
    else if (col < n)
    {
      border_row[r - n][col] = e.value;
    }
    else
    {
      corner[r - n][col - n] += e.value;
    }
  }
  for (lapack_int r = 0; r < n; ++r)
  {
    rhs[r] = -F[r];
  }
  std::vector<lapack_int> ipiv(n);
  const lapack_int info =
    LAPACKE_dgbsv(LAPACK_COL_MAJOR, n, kl, ku, 3, ab.data(), ldab, ipiv.data(), rhs.data(), n);
  if (info != 0)
  {
    return sparse_step(x, F);
  }
  // A y0 = -F, A Y = B; step_u = y0 - Y dl with (C Y - D) dl = C y0 + F_mass.
  double S[2][2], t[2];
  for (int a = 0; a < 2; ++a)
  {
    t[a] = F[2 * m_ + a];
    for (lapack_int r = 0; r < n; ++r)
    {
      t[a] += border_row[a][r] * rhs[r];
    }
    for (int b = 0; b < 2; ++b)
    {
      double acc = 0.0;
      for (lapack_int r = 0; r < n; ++r)
      {
        acc += border_row[a][r] * rhs[static_cast<std::size_t>(n) * (1 + b) + r];
      }
      S[a][b] = acc - corner[a][b];
    }
  }
  const double det = S[0][0] * S[1][1] - S[0][1] * S[1][0];
  if (!(std::abs(det) > 0.0) || !std::isfinite(det))
  {
    return sparse_step(x, F);
  }
  const double dl0 = (S[1][1] * t[0] - S[0][1] * t[1]) / det;
  const double dl1 = (S[0][0] * t[1] - S[1][0] * t[0]) / det;
  StepResult out;
  out.step.assign(unknowns(), 0.0);
  for (lapack_int r = 0; r < n; ++r)
  {
    out.step[r] = rhs[r] - rhs[static_cast<std::size_t>(n) + r] * dl0 -
                  rhs[static_cast<std::size_t>(n) * 2 + r] * dl1;
  }
  out.step[2 * m_] = dl0;
  out.step[2 * m_ + 1] = dl1;
  hold_frozen(out.step);
  out.ok = std::all_of(out.step.begin(), out.step.end(), [](double v) { return std::isfinite(v); });
  return out;
}

// The identity rows give zero up to rounding of the elimination.
void KKTSystem::hold_frozen(std::vector<double> &step) const
{
  if (frozen_ < 0)
  {
    return;
  }
  for (std::size_t i = 0; i < m_; ++i)
  {
    step[2 * i + static_cast<std::size_t>(frozen_)] = 0.0;
  }
  step[2 * m_ + static_cast<std::size_t>(frozen_)] = 0.0;
}

KKTSystem::StepResult KKTSystem::sparse_step(const std::vector<double> &x,
                                             const std::vector<double> &F) const
{
  const auto entries = jacobian(x);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(entries.size());
  for (const auto &e : entries)
  {
    trip.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.value);
  }
  const int n = static_cast<int>(unknowns());
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  StepResult out;
  out.fallback = true;
  if (lu.info() != Eigen::Success)
  {
    return out;
  }
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i)
  {
    b[i] = -F[i];
  }
  const Eigen::VectorXd s = lu.solve(b);
  if (lu.info() != Eigen::Success || !s.allFinite())
  {
    return out;
  }
  out.step.assign(s.data(), s.data() + n);
  hold_frozen(out.step);
  out.ok = true;
  return out;
}

void NewtonOptions::validate() const
{
  if (!(tol > 0.0) || max_iters < 0 || !(min_damping > 0.0 && min_damping <= 1.0) ||
      frozen < -1 || frozen > 1)
  {
    throw ConfigError(
      "newton options: need tol > 0, max_iters >= 0, 0 < min_damping <= 1, frozen in {-1, 0, 1}");
  }
}

Solution newton_refine(const SystemParams &pm, const State &init, const NewtonOptions &opts)
{
  const auto lam = lagrange_multipliers(pm, init);
  return newton_refine(pm, init, lam.lambda1, lam.lambda2, opts);
}

Solution newton_refine(const SystemParams &pm, const State &init, double lambda1,
                       double lambda2, const NewtonOptions &opts)
{
  pm.validate();
  opts.validate();
  const Regime regime = classify_regime(pm);
  if (regime.tag == RegimeTag::CriticalUnsupported)
  {
    throw RegimeError("newton_refine: critical exponents are not supported");
  }
  const KKTSystem sys(pm, init.grid_ptr(), opts.frozen);
  auto x = sys.pack(init, lambda1, lambda2);
  auto F = sys.residual(x);
  double phi = sys.merit(F);
  std::vector<double> history{phi};
  int it = 0;
  int fallbacks = 0;
  std::string note;
  bool stalled = false;
  // Each component's PDE rows against tol max(1, |λ_k| |u_k|_2).
  const auto w = init.grid().weights();
  const auto done = [&](const std::vector<double> &R)
  {
    const std::size_t m = sys.nodes();
    double e[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < m; ++i)
    {
      e[0] += w[i] * R[2 * i] * R[2 * i];
      e[1] += w[i] * R[2 * i + 1] * R[2 * i + 1];
    }
    const double mdef = std::max(std::abs(R[2 * m]) / pm.a1, std::abs(R[2 * m + 1]) / pm.a2);
    return std::sqrt(e[0]) <= opts.tol * component_scale(x[2 * m], pm.a1) &&
           std::sqrt(e[1]) <= opts.tol * component_scale(x[2 * m + 1], pm.a2) &&
           2.0 * mdef <= opts.mass_tol;
  };
  while (!done(F))
  {
    if (it >= opts.max_iters)
    {
      note = "iteration limit reached";
      stalled = true;
      break;
    }
    const auto step = sys.newton_step(x, F);
    fallbacks += step.fallback ? 1 : 0;
    if (!step.ok)
    {
      note = "singular Jacobian";
      stalled = true;
      break;
    }
    double alpha = 1.0;
    bool accepted = false;
    while (alpha >= opts.min_damping)
    {
      std::vector<double> trial(x);
      for (std::size_t k = 0; k < trial.size(); ++k)
      {
        trial[k] += alpha * step.step[k];
      }
      auto Ft = sys.residual(trial);
      const double pt = sys.merit(Ft);
      if (std::isfinite(pt) && pt < (1.0 - 1e-4 * alpha) * phi)
      {
        x = std::move(trial);
        F = std::move(Ft);
        phi = pt;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    ++it;
    if (!accepted)
    {
      note = "damping limit reached";
      stalled = true;
      break;
    }
    history.push_back(phi);
  }

  State st = sys.unpack_state(x);
  const double l1 = x[2 * sys.nodes()], l2 = x[2 * sys.nodes() + 1];

  // Positivity pass.
  bool rejected = false;
  const auto clean = [&](const RadialField &u, const char *name)
  {
    std::vector<double> v = u.data();
    const double top = *std::max_element(v.begin(), v.end());
    const double bottom = *std::min_element(v.begin(), v.end());
    if (!(top > 0.0))
    {
      rejected = true;
      note = std::string(name) + " vanishes or is negative";
      return u;
    }
    if (bottom < -opts.sign_noise * top)
    {
      rejected = true;
      note = std::string(name) + " changes sign";
      return u;
    }
    for (double &e : v)
    {
      e = std::max(e, 0.0);
    }
    return RadialField(u.grid_ptr(), std::move(v));
  };
  st = State(clean(st.u1, "u1"), clean(st.u2, "u2"));
  if (!stalled && !rejected)
  {
    st = State(opts.frozen == 0 ? st.u1 : st.u1.scaled(std::sqrt(pm.a1 / mass(st.u1))),
               opts.frozen == 1 ? st.u2 : st.u2.scaled(std::sqrt(pm.a2 / mass(st.u2))));
  }

  Solution sol = evaluate_solution(pm, std::move(st), l1, l2);
  sol.iterations = it;
  sol.method = "newton";
  sol.history = std::move(history);
  if (!stalled && !rejected && !((l1 < 0.0 || opts.frozen == 0) && (l2 < 0.0 || opts.frozen == 1)))
  {
    rejected = true;
    note = "multiplier with nonnegative sign";
  }
  const auto res = gradient_residual(pm, sol.state, l1, l2);
  if (!stalled && !rejected && opts.frozen < 0 &&
      (l2_norm(res.first) > opts.tol * component_scale(l1, pm.a1) ||
       l2_norm(res.second) > opts.tol * component_scale(l2, pm.a2)))
  {
    rejected = true;
    note = "residual above tolerance after the positivity pass";
  }
  sol.converged = !stalled && !rejected;
  if (fallbacks > 0)
  {
    note += (note.empty() ? "" : "; ") + std::to_string(fallbacks) + " sparse LU fallbacks";
  }
  sol.note = note;
  return sol;
}

double component_scale(double lambda, double a)
{
  return std::max(1.0, std::abs(lambda) * std::sqrt(a));
}

std::vector<double> quadratic_tail(const Solution &sol)
{
  std::vector<double> out;
  const auto &h = sol.history;
  for (std::size_t k = h.size() >= 4 ? h.size() - 3 : 1; k < h.size(); ++k)
  {
    out.push_back(h[k] / (h[k - 1] * h[k - 1]));
  }
  return out;
}

}  // namespace nlsnorm
