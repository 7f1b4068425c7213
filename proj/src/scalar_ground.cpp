#include "nlsnorm/scalar_ground.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "nlsnorm/errors.hpp"

namespace nlsnorm
{

namespace ode = boost::numeric::odeint;

bool is_critical(int dim, double p)
{
  return std::abs(p - (2.0 + 4.0 / dim)) <= 1e-12;
}

ScalarProblem::ScalarProblem(int dim_, double p_, double mu_) : ScalarProblem(dim_, p_, mu_, false)
{
}

ScalarProblem ScalarProblem::gn_optimizer(int dim, double p)
{
  return ScalarProblem(dim, p, 1.0, true);
}

ScalarProblem::ScalarProblem(int dim_, double p_, double mu_, bool allow_critical)
  : dim(dim_), p(p_), mu(mu_)
{
  if (dim < 1)
  {
    throw ConfigError("dimension must be >= 1");
  }
  if (!(mu > 0.0) || !std::isfinite(mu))
  {
    throw ConfigError("mu must be positive");
  }
  if (!(p > 2.0) || !(p < sobolev_exponent()))
  {
    throw ConfigError("p must lie in (2, 2N/(N-2))");
  }
  if (!allow_critical && is_critical(dim, p))
  {
    throw RegimeError("p = 2 + 4/N is the mass-critical exponent and is not supported");
  }
}

double ScalarProblem::sobolev_exponent() const
{
  return dim <= 2 ? std::numeric_limits<double>::infinity() : 2.0 * dim / (dim - 2.0);
}

GroundProfile::GroundProfile(int dim, double delta, std::vector<double> w, std::vector<double> dw)
  : dim_(dim), delta_(delta), w_(std::move(w)), dw_(std::move(dw))
{
  // Decay rate matching w'/w at r_cut, so the tail is C^1.
  const double k = -dw_.back() / w_.back() - 0.5 * (dim_ - 1) / r_cut();
  decay_ = std::clamp(k, 0.5, 1.5);
}

double GroundProfile::operator()(double r) const
{
  r = std::abs(r);
  const double rc = r_cut();
  if (r >= rc)
  {
    return w_.back() * std::pow(rc / r, 0.5 * (dim_ - 1)) * std::exp(-decay_ * (r - rc));
  }
  std::size_t k = static_cast<std::size_t>(r / delta_);
  k = std::min(k, w_.size() - 2);
  const double t = (r - delta_ * static_cast<double>(k)) / delta_;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * w_[k] + (t3 - 2 * t2 + t) * delta_ * dw_[k] +
         (-2 * t3 + 3 * t2) * w_[k + 1] + (t3 - t2) * delta_ * dw_[k + 1];
}

double GroundState::unit_level() const
{
  return 0.5 * grad_w - problem.mu / problem.p * plevel_w;
}

namespace
{

using Vec = std::array<double, 5>;  // w, w', mass, |w'|^2, |w|^p integrals

enum class Outcome
{
  Undershoot,  // w' turned positive: w(0) too small
  Overshoot,   // w crossed zero: w(0) too large
  Undecided,
};

constexpr double table_step = 1.0 / 1024.0;
constexpr double r_start = 1e-3;
constexpr double r_limit = 400.0;

struct Trajectory
{
  Outcome outcome = Outcome::Undecided;
  std::vector<Vec> table;  // samples at k * table_step
};

class Shooter
{
public:
  Shooter(const ScalarProblem &pb, double tol) : pb_(pb), tol_(tol), omega_(sphere_area(pb.dim)) {}

  Vec series(double w0, double r) const
  {
    const double n = pb_.dim;
    const double f0 = w0 - pb_.mu * std::pow(w0, pb_.p - 1.0);
    const double df0 = 1.0 - pb_.mu * (pb_.p - 1.0) * std::pow(w0, pb_.p - 2.0);
    const double c2 = f0 / (2.0 * n);
    const double c4 = df0 * c2 / (4.0 * (n + 2.0));
    const double rn = omega_ * std::pow(r, pb_.dim) / n;
    const double rn2 = omega_ * std::pow(r, pb_.dim + 2) / (n + 2.0);
    return {w0 + c2 * r * r + c4 * std::pow(r, 4), 2.0 * c2 * r + 4.0 * c4 * r * r * r,
            w0 * w0 * rn + 2.0 * w0 * c2 * rn2, 4.0 * c2 * c2 * rn2,
            std::pow(w0, pb_.p) * rn + pb_.p * std::pow(w0, pb_.p - 1.0) * c2 * rn2};
  }

  Trajectory run(double w0, bool record) const
  {
    Trajectory tr;
    const auto rhs = [this](const Vec &y, Vec &dy, double r)
    {
      const double w = y[0];
      const double aw = std::abs(w);
      const double wp = aw == 0.0 ? 0.0 : std::pow(aw, pb_.p - 2.0);
      const double jac = omega_ * std::pow(r, pb_.dim - 1);
      dy[0] = y[1];
      dy[1] = -(pb_.dim - 1) / r * y[1] + w - pb_.mu * wp * w;
      dy[2] = jac * w * w;
      dy[3] = jac * y[1] * y[1];
      dy[4] = jac * wp * aw * aw;
    };
    auto stepper = ode::make_dense_output(tol_, tol_, ode::runge_kutta_dopri5<Vec>());
    stepper.initialize(series(w0, r_start), r_start, 1e-4);

    std::size_t next = 0;
    if (record)
    {
      while (table_step * static_cast<double>(next) < r_start)
      {
        tr.table.push_back(series(w0, table_step * static_cast<double>(next)));
        ++next;
      }
    }
    Vec tmp;
    while (stepper.current_time() < r_limit)
    {
      const auto [t0, t1] = stepper.do_step(rhs);
      if (record)
      {
        while (table_step * static_cast<double>(next) <= t1)
        {
          stepper.calc_state(table_step * static_cast<double>(next), tmp);
          if (tmp[0] <= 0.0 || tmp[1] > 0.0)
          {
            break;
          }
          tr.table.push_back(tmp);
          ++next;
        }
      }
      (void)t0;
      const Vec &y = stepper.current_state();
      if (y[0] < 0.0)
      {
        tr.outcome = Outcome::Overshoot;
        return tr;
      }
      if (y[1] > 0.0)
      {
        tr.outcome = Outcome::Undershoot;
        return tr;
      }
    }
    return tr;
  }

  Outcome classify(double w0) const
  {
    if (w0 - pb_.mu * std::pow(w0, pb_.p - 1.0) >= 0.0)
    {
      return Outcome::Undershoot;  // at or below the constant equilibrium
    }
    return run(w0, false).outcome;
  }

private:
  const ScalarProblem &pb_;
  double tol_;
  double omega_;
};

}  // namespace

GroundState solve_unit_ground(const ScalarProblem &problem, GridPtr grid, double tol,
                              const ShootOptions &opts)
{
  if (!(tol > 0.0))
  {
    throw ConfigError("tolerance must be positive");
  }
  if (grid->dim() != problem.dim)
  {
    throw StructuralError("grid dimension differs from the problem dimension");
  }
  const Shooter shooter(problem, opts.ode_tolerance);

  // Bracket: undershoot below, overshoot above.
  const double equilibrium = std::pow(1.0 / problem.mu, 1.0 / (problem.p - 2.0));
  double guess = opts.initial_guess > 0.0 ? opts.initial_guess : 2.0 * equilibrium;
  double lo = 0.0, hi = 0.0;
  const Outcome first = shooter.classify(guess);
  if (first == Outcome::Undershoot)
  {
    lo = guess;
    hi = guess;
    int k = 0;
    for (; k < opts.max_expansions; ++k)
    {
      hi *= opts.expansion;
      const Outcome o = shooter.classify(hi);
      if (o == Outcome::Overshoot)
      {
        break;
      }
      lo = hi;
    }
    if (k == opts.max_expansions)
    {
      throw NoBracketError("no overshooting initial value found up to " + std::to_string(hi));
    }
  }
  else if (first == Outcome::Overshoot)
  {
    hi = guess;
    lo = guess;
    int k = 0;
    for (; k < opts.max_expansions; ++k)
    {
      lo /= opts.expansion;
      if (shooter.classify(lo) == Outcome::Undershoot)
      {
        break;
      }
      hi = lo;
    }
    if (k == opts.max_expansions)
    {
      throw NoBracketError("no undershooting initial value found down to " + std::to_string(lo));
    }
  }
  else
  {
    throw NoBracketError("initial value " + std::to_string(guess) + " could not be classified");
  }

  int steps = 0;
  for (; steps < opts.max_iterations; ++steps)
  {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
    {
      break;
    }
    const Outcome o = shooter.classify(mid);
    if (o == Outcome::Undershoot)
    {
      lo = mid;
    }
    else if (o == Outcome::Overshoot)
    {
      hi = mid;
    }
    else
    {
      lo = hi = mid;
      break;
    }
  }

  const Trajectory a = shooter.run(lo, true);
  const Trajectory b = shooter.run(hi, true);
  const std::size_t n = std::min(a.table.size(), b.table.size());
  std::size_t cut = 0;
  while (cut + 1 < n)
  {
    const double wa = a.table[cut + 1][0];
    const double wb = b.table[cut + 1][0];
    if (std::abs(wa - wb) > 1e-6 * std::abs(wa))
    {
      break;
    }
    ++cut;
  }
  if (cut < 16)
  {
    throw NumericError("shooting trajectories separate immediately");
  }
  std::vector<double> w(cut + 1), dw(cut + 1);
  for (std::size_t k = 0; k <= cut; ++k)
  {
    w[k] = 0.5 * (a.table[k][0] + b.table[k][0]);
    dw[k] = 0.5 * (a.table[k][1] + b.table[k][1]);
  }
  const Vec &end = a.table[cut];
  const double rc = table_step * static_cast<double>(cut);
  const double omega = sphere_area(problem.dim);
  // Tail contributions to mass and kinetic energy, to leading order.
  auto profile = std::make_shared<const GroundProfile>(problem.dim, table_step, w, dw);
  const double k = profile->decay();
  const double tail_mass = 0.5 / k * omega * w[cut] * w[cut] * std::pow(rc, problem.dim - 1);
  const double tail_grad = 0.5 / k * omega * dw[cut] * dw[cut] * std::pow(rc, problem.dim - 1);

  std::vector<double> values(grid->size());
  const auto r = grid->nodes();
  for (std::size_t i = 0; i < values.size(); ++i)
  {
    values[i] = (*profile)(r[i]);
  }
  values.back() = 0.0;

  GroundState gs{problem,
                 RadialField(grid, std::move(values)),
                 end[2] + tail_mass,
                 end[3] + tail_grad,
                 end[4],
                 0.5 * (lo + hi),
                 profile,
                 steps};

  const double pairing = gs.grad_w + gs.mass_w;
  const double defect = std::abs(pairing - problem.mu * gs.plevel_w) / pairing;
  if (defect > 10.0 * tol)
  {
    throw NumericError("ground state pairing identity violated: relative defect " +
                       std::to_string(defect));
  }
  return gs;
}

double rescaled_lambda(const GroundState &gs, double a)
{
  if (!(a > 0.0))
  {
    throw ConfigError("mass must be positive");
  }
  const auto &pb = gs.problem;
  const double e = 2.0 * (pb.p - 2.0) / (4.0 - pb.dim * (pb.p - 2.0));
  return std::pow(a / gs.mass_w, e);
}

GridPtr rescaled_grid(const GroundState &gs, double a)
{
  const double lambda = rescaled_lambda(gs, a);
  return RadialGrid::uniform(gs.problem.dim, gs.w.size(), gs.w.grid().r_max() / std::sqrt(lambda));
}

RescaledGround rescale_to_mass(const GroundState &gs, double a, GridPtr target)
{
  const double lambda = rescaled_lambda(gs, a);
  if (!target)
  {
    target = rescaled_grid(gs, a);
  }
  const double sl = std::sqrt(lambda);
  // In units of the ground-state length 1/√λ.
  const double reach = target->r_max() * sl;
  const double spacing = target->h() * sl;
  if (reach < 12.0 || spacing > 0.1)
  {
    throw ResolutionError("grid cannot represent u_a at lambda_a = " + std::to_string(lambda) +
                          " (r_max sqrt(lambda) = " + std::to_string(reach) +
                          ", h sqrt(lambda) = " + std::to_string(spacing) + ")");
  }
  const double amp = std::pow(lambda, 1.0 / (gs.problem.p - 2.0));
  std::vector<double> v(target->size());
  const auto r = target->nodes();
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    v[i] = amp * (*gs.profile)(sl * r[i]);
  }
  v.back() = 0.0;
  RadialField u(target, std::move(v));
  const double m = mass(u);
  if (std::abs(m - a) > 1e-6 * a)
  {
    throw ResolutionError("rescaled ground state has mass " + std::to_string(m) + " instead of " +
                          std::to_string(a));
  }
  return {lambda, std::move(u)};
}

double ground_level(const GroundState &gs, double a)
{
  const auto &pb = gs.problem;
  const double lambda = rescaled_lambda(gs, a);
  return std::pow(lambda, pb.p / (pb.p - 2.0) - pb.dim / 2.0) * gs.unit_level();
}

std::vector<LevelRow> level_curve(const ScalarProblem &problem, GridPtr grid,
                                  const std::vector<double> &a_values, double tol)
{
  for (std::size_t i = 0; i < a_values.size(); ++i)
  {
    if (!(a_values[i] > 0.0))
    {
      throw ConfigError("level_curve: masses must be positive");
    }
    if (i > 0 && !(a_values[i] > a_values[i - 1]))
    {
      throw ConfigError("level_curve: masses must be strictly increasing");
    }
  }
  const GroundState gs = solve_unit_ground(problem, std::move(grid), tol);
  std::vector<LevelRow> rows(a_values.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < a_values.size(); ++i)
  {
    rows[i] = {a_values[i], ground_level(gs, a_values[i]), rescaled_lambda(gs, a_values[i])};
  }
  return rows;
}

}  // namespace nlsnorm
