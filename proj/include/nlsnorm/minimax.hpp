#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "nlsnorm/decoupled.hpp"
#include "nlsnorm/newton.hpp"
#include "nlsnorm/solution.hpp"

namespace nlsnorm
{

/// J at (σ1*u1, σ2*u2) from the norms of (u1, u2), exact up to the one
/// interpolated mixed term.
class DilatedPair
{
public:
  DilatedPair(const SystemParams &params, RadialField u1, RadialField u2);

  /// J(σ1*u1, 0) and the rest, ½|∇u2|² - (μ2/p2)|u2|^p2 - βM. Near B the rest
  /// is far below the rounding of J, so comparisons use the two parts.
  struct Split
  {
    double first;
    double rest;
    double total() const { return first + rest; }
  };
  Split split(double sigma1, double sigma2) const;
  double J(double sigma1, double sigma2) const { return split(sigma1, sigma2).total(); }
  double grad2(double sigma2) const { return std::exp(2.0 * sigma2) * n_.grad2; }
  /// |σ*u1|_e^e for the exponent e.
  double lp1(double sigma1, double e) const;

  const RadialField &u1() const { return u1_; }
  const RadialField &u2() const { return u2_; }
  const Norms &norms() const { return n_; }
  const SystemParams &params() const { return params_; }

private:
  SystemParams params_;
  RadialField u1_, u2_;
  Norms n_;
};

struct PathOptions
{
  double s_initial = 1.0;
  double s_growth = 1.25;
  double s_max = 60.0;
  int samples = 401;
  double golden_tol = 1e-9;
  /// End the path in the first well of J past the endpoint conditions
  /// instead of at σ = +s.
  bool stop_in_well = false;
  double scan_step = 0.05;
};

/// h(t) = (u̲, σ(t)*ū), σ(t) = -s + t(σ_end + s): u̲ the minimizer of J(., 0)
/// on S(a1), ū the scalar ground state on S(a2). σ_end = s is the symmetric
/// path. States are generated on demand.
struct Path
{
  DecoupledPair ground;
  DilatedPair pair;
  double s = 0.0;
  double sigma_end = 0.0;
  double c_lower = 0.0;  // c(u̲)
  std::vector<double> t;
  std::vector<double> J;

  double sigma(double tt) const { return -s + tt * (sigma_end + s); }
  double J_at(double tt) const { return pair.J(0.0, sigma(tt)); }
  /// From the ground-state profiles on a grid sized for λ̲ and e^{2σ}λ̄.
  State state_at(double tt, const GridPolicy &policy = {}) const;
};

struct InfBEstimate
{
  double value;
  /// value - J(u̲, 0), free of the rounding of J(u̲, 0).
  double over_lower;
  double sigma1;       // dilation of the u1 candidate
  std::string u1_tag;  // ensemble member names
  std::string u2_tag;
  int samples = 0;
};

/// Minimum of J sampled over B: u1 from dilations of u̲ and Gaussian
/// profiles on S(a1), u2 from dilations of ū and Gaussians on S(a2) set to
/// |∇u2|² = 2c(u1).
InfBEstimate sample_inf_B(const SystemParams &params, const Threshold &c, const DecoupledPair &pair);

/// Increases s until h(0) ∈ A(u̲), h(1) ∉ A_{2c(u̲)}, J(h(1)) < 0 and both
/// endpoint levels lie below inf_B. Throws GeometryError past s_max.
Path build_path(const SystemParams &params, const DecoupledPair &pair, const Threshold &c,
                const InfBEstimate &inf_B, const PathOptions &opts = {});

struct PathMax
{
  double t_star;
  double J_max;
  State state;
};

PathMax path_max(const Path &path, const PathOptions &opts = {}, const GridPolicy &policy = {});

struct GammaOptions
{
  PathOptions path;
  NewtonOptions newton;
  GridPolicy policy;
  GridPtr grid;  // nullptr: from the decoupled scales
  double slack = 1e-3;  // relative to |m1 + m2|
  /// When Newton from the path maximum fails, continue in β from the
  /// decoupled pair (the β = 0 path maximum).
  bool continuation_fallback = true;
};

struct GammaEstimate
{
  double gamma_upper;  // path maximum
  double inf_B_lower;  // sampled inf over B
  double level;        // m1 + m2
  bool level_negative;
  double c_lower;
  double s;
  double t_star;
  Solution solution;
  bool bracket_holds;  // inf_B ≤ J ≤ γ_up + slack, γ_up ≤ m1 + m2 + slack
  std::string note;
};

GammaEstimate gamma_estimate(const SystemParams &params, const GammaOptions &opts = {});

/// Ground states for μ_k + β r_k rescaled to the masses a_k; the exact coupled
/// solution when p1 = p2 = r1 + r2, r1 = r2, μ1 = μ2, a1 = a2, otherwise an
/// initial guess for large β.
State synchronized_state(const SystemParams &params, GridPtr grid = nullptr,
                         const GridPolicy &policy = {});

/// Newton from an initial state, then regridding to the multipliers found
/// and polishing when the grid does not resolve them.
Solution refine_resolved(const SystemParams &params, const State &init,
                         const NewtonOptions &opts = {}, const GridPolicy &policy = {});

struct BetaRow
{
  double beta;
  bool converged;
  double J;
  double lambda1;
  double lambda2;
  double Q;
  double residual;
  std::size_t nodes;
  std::string note;
};

struct SweepOptions
{
  NewtonOptions newton;
  GridPolicy policy;
  double min_step = 1e-3;  // halving floor, relative to the requested step
};

/// Continuation in β through the requested values; the previous converged
/// solution warm-starts the next, the step halves on failure.
/// solutions, when given, gets one entry per row; failed rows carry the last
/// converged state with converged = false.
std::vector<BetaRow> beta_sweep(const SystemParams &params, const std::vector<double> &betas,
                                const SweepOptions &opts = {},
                                std::vector<Solution> *solutions = nullptr);

}  // namespace nlsnorm
