#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nlsnorm/radial_grid.hpp"

namespace nlsnorm
{

struct SystemParams
{
  int dim = 3;
  double p1 = 2.5, p2 = 2.5;
  double r1 = 1.2, r2 = 1.2;
  double mu1 = 1.0, mu2 = 1.0;
  double beta = 1.0;
  double a1 = 1.0, a2 = 1.0;

  /// Range checks; throws ConfigError. Critical exponents pass here and are
  /// reported by classify_regime.
  void validate() const;

  double critical_exponent() const { return 2.0 + 4.0 / dim; }
  double sobolev_exponent() const;

  /// Component labels exchanged.
  SystemParams swapped() const;

  bool operator==(const SystemParams &) const = default;
};

enum class RegimeTag
{
  SubcriticalMin,
  SubcriticalMinHighDim,
  Mixed,
  Supercritical,
  CriticalUnsupported,
  Unclassified,
};

struct Regime
{
  RegimeTag tag;
  /// Outside the dimensions or exponent ranges where existence is known.
  bool experimental = false;
  std::string note;
};

std::string to_string(RegimeTag tag);
Regime classify_regime(const SystemParams &params);

struct State
{
  RadialField u1;
  RadialField u2;

  State(RadialField a, RadialField b);

  const RadialGrid &grid() const { return u1.grid(); }
  const GridPtr &grid_ptr() const { return u1.grid_ptr(); }
};

/// Integrals entering J and Q.
struct Norms
{
  double grad1 = 0, grad2 = 0;  // |∇u_i|²
  double pow1 = 0, pow2 = 0;    // |u_i|_{p_i}^{p_i}
  double mixed = 0;             // ∫|u1|^{r1}|u2|^{r2}
  double mass1 = 0, mass2 = 0;
};

Norms compute_norms(const SystemParams &params, const State &state);

double energy_J(const SystemParams &params, const Norms &n);
double energy_J(const SystemParams &params, const State &state);
double pohozaev_Q(const SystemParams &params, const Norms &n);
double pohozaev_Q(const SystemParams &params, const State &state);

/// Multipliers in the convention -Δu_i = λ_i u_i + ...; a decoupled ground
/// state gives λ = -λ_a.
struct Multipliers
{
  double lambda1;
  double lambda2;
};

Multipliers lagrange_multipliers(const SystemParams &params, const Norms &n);
Multipliers lagrange_multipliers(const SystemParams &params, const State &state);

/// Component residuals of the system; zero at r_max.
std::pair<RadialField, RadialField> gradient_residual(const SystemParams &params,
                                                      const State &state, double lambda1,
                                                      double lambda2);

/// Weighted L² norm of the pair of residuals.
double residual_norm(const std::pair<RadialField, RadialField> &res);

struct FiberRow
{
  double s;
  double J;
  double Q;
};

/// J and Q along s ↦ s*state from the exact scaling of cached norms.
std::vector<FiberRow> fiber_profile(const SystemParams &params, const Norms &n,
                                    const std::vector<double> &s_values);
std::vector<FiberRow> fiber_profile(const SystemParams &params, const State &state,
                                    const std::vector<double> &s_values);

/// Sharp constant in |u|_p ≤ C |∇u|_2^α |u|_2^{1-α}, α = N(p-2)/(2p), from the
/// optimizer sampled on grid.
double gn_constant(int dim, double p, GridPtr grid);

/// Gagliardo-Nirenberg quotient |u|_p / (|∇u|_2^α |u|_2^{1-α}).
double gn_quotient(const RadialField &u, double p);

/// Threshold c(u1) separating the sets A and B in the mixed regime. The
/// constants depend only on the parameters and are computed once.
class Threshold
{
public:
  Threshold(const SystemParams &params, GridPtr gn_grid = nullptr);

  double operator()(const RadialField &u1) const;
  /// Same from |u1|_e^e with e = norm_exponent().
  double from_norm_pow(double lp_pow) const;
  double norm_exponent() const { return params_.r1 * q_; }

  double q() const { return q_; }
  double q_conjugate() const { return qc_; }
  double gamma() const { return gamma_; }
  double K1() const { return K1_; }
  double K2() const { return K2_; }
  /// First branch of the minimum, independent of u1.
  double c_cap() const { return cap_; }

private:
  SystemParams params_;
  double q_, qc_, gamma_, K1_, K2_, cap_;
};

double threshold_c(const SystemParams &params, const RadialField &u1);

/// Admissible interval for q in the Hölder splitting of the coupling term,
/// with the additional strict upper bound that makes γ > 2.
std::pair<double, double> admissible_q_interval(const SystemParams &params);

}  // namespace nlsnorm
