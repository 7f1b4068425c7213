#pragma once

#include <memory>
#include <vector>

#include "nlsnorm/radial_grid.hpp"

namespace nlsnorm
{

/// -Δw + w = μ|w|^{p-2}w in R^N.
struct ScalarProblem
{
  int dim;
  double p;
  double mu;

  ScalarProblem(int dim, double p, double mu);

  /// μ = 1 problem whose ground state optimizes the Gagliardo-Nirenberg
  /// quotient; the critical exponent is admitted here.
  static ScalarProblem gn_optimizer(int dim, double p);

  double critical_exponent() const { return 2.0 + 4.0 / dim; }
  /// Sobolev exponent 2N/(N-2); +inf for N <= 2.
  double sobolev_exponent() const;

private:
  ScalarProblem(int dim, double p, double mu, bool allow_critical);
};

bool is_critical(int dim, double p);

/// Radial profile of the unit ground state produced by the shooting solver.
/// Cubic Hermite in (w, w') on a fine uniform table up to r_cut, then the
/// tail w(r_cut) (r_cut/r)^{(N-1)/2} e^{-k (r - r_cut)}, k ≈ 1 fitted to w'/w.
class GroundProfile
{
public:
  GroundProfile(int dim, double delta, std::vector<double> w, std::vector<double> dw);

  double operator()(double r) const;
  double r_cut() const { return delta_ * static_cast<double>(w_.size() - 1); }
  double decay() const { return decay_; }

private:
  int dim_;
  double decay_ = 1.0;
  double delta_;
  std::vector<double> w_;
  std::vector<double> dw_;
};

struct ShootOptions
{
  double initial_guess = 0.0;  // 0: derived from the equilibrium 1/μ^{1/(p-2)}
  double expansion = 2.0;
  int max_expansions = 60;
  int max_iterations = 200;
  double ode_tolerance = 1e-13;
};

struct GroundState
{
  ScalarProblem problem;
  RadialField w;
  double mass_w;
  double grad_w;
  double plevel_w;
  double shoot_value;
  std::shared_ptr<const GroundProfile> profile;
  int bisection_steps = 0;

  /// ½|∇w|² - (μ/p)|w|_p^p from the cached norms.
  double unit_level() const;
};

GroundState solve_unit_ground(const ScalarProblem &problem, GridPtr grid, double tol = 1e-10,
                              const ShootOptions &opts = {});

struct RescaledGround
{
  double lambda;
  RadialField u;
};

/// λ_a = (a/|w|²)^{2(p-2)/(4-N(p-2))}, u_a(r) = λ_a^{1/(p-2)} w(√λ_a r).
double rescaled_lambda(const GroundState &gs, double a);

/// Grid matched to the length scale of u_a: the node count of gs.w and
/// r_max divided by √λ_a.
GridPtr rescaled_grid(const GroundState &gs, double a);

/// u_a sampled on target, or on rescaled_grid(gs, a) when target is null.
/// Throws ResolutionError when the target grid cannot represent u_a.
RescaledGround rescale_to_mass(const GroundState &gs, double a, GridPtr target = nullptr);

/// m_p^μ(a) = λ_a^{p/(p-2) - N/2} I(w).
double ground_level(const GroundState &gs, double a);

struct LevelRow
{
  double a;
  double m;
  double lambda;
};

std::vector<LevelRow> level_curve(const ScalarProblem &problem, GridPtr grid,
                                  const std::vector<double> &a_values, double tol = 1e-10);

}  // namespace nlsnorm
