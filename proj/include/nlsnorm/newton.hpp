#pragma once

#include <vector>

#include "nlsnorm/solution.hpp"

namespace nlsnorm
{

/// Discrete system -Δ_h u_k = λ_k u_k + f_k(u1, u2) on the nodes before r_max,
/// with the two mass constraints. The unknown vector interleaves the nodal
/// values (u1_0, u2_0, u1_1, u2_1, ...) followed by λ1, λ2, so the Jacobian is
/// banded with five sub- and super-diagonals plus a two-column border.
class KKTSystem
{
public:
  static constexpr int bandwidth = 5;

  /// frozen = 0 or 1 holds that component and its multiplier fixed: its rows
  /// become identity rows with zero residual.
  KKTSystem(const SystemParams &params, GridPtr grid, int frozen = -1);

  std::size_t nodes() const { return m_; }
  std::size_t unknowns() const { return 2 * m_ + 2; }

  std::vector<double> pack(const State &state, double lambda1, double lambda2) const;
  State unpack_state(const std::vector<double> &x) const;

  /// PDE rows, then ½(|u_k|² - a_k).
  std::vector<double> residual(const std::vector<double> &x) const;

  /// Weighted L² norm of the PDE rows plus the absolute mass defects.
  double merit(const std::vector<double> &F) const;

  /// Dense (row, col, value) triplets of the Jacobian; for tests and the
  /// sparse fallback.
  struct Entry
  {
    std::size_t row, col;
    double value;
  };
  std::vector<Entry> jacobian(const std::vector<double> &x) const;

  struct StepResult
  {
    std::vector<double> step;
    bool ok = false;
    bool fallback = false;  // banded factorization failed, sparse LU used
  };

  /// Solves J(x) step = -F.
  StepResult newton_step(const std::vector<double> &x, const std::vector<double> &F) const;

  /// Same by sparse LU on the assembled matrix; the fallback of newton_step.
  StepResult sparse_step(const std::vector<double> &x, const std::vector<double> &F) const;

private:
  void hold_frozen(std::vector<double> &step) const;

  SystemParams params_;
  GridPtr grid_;
  std::size_t m_;
  int frozen_;
};

/// max(1, |λ| √a). Newton tolerances apply per component relative to it so
/// that large multipliers or masses do not push tol below rounding.
double component_scale(double lambda, double a);

struct NewtonOptions
{
  double tol = 1e-8;
  int max_iters = 40;
  double min_damping = 1.0 / 1024.0;
  double mass_tol = 1e-10;
  /// Negative values of relative size below this are treated as rounding in
  /// the tail and set to zero; larger ones reject the solution.
  double sign_noise = 1e-10;
  /// Component held fixed (-1: none). Convergence then refers to the other
  /// component's equations only.
  int frozen = -1;

  void validate() const;
};

/// Damped Newton on the KKT system. Rejected limits (sign change, vanishing
/// component, nonnegative multiplier) come back with converged = false and a
/// note.
Solution newton_refine(const SystemParams &params, const State &init,
                       const NewtonOptions &opts = {});
Solution newton_refine(const SystemParams &params, const State &init, double lambda1,
                       double lambda2, const NewtonOptions &opts = {});

/// Ratios r_{k+1} / r_k^2 over the last three residuals; bounded values
/// indicate a quadratic tail.
std::vector<double> quadratic_tail(const Solution &sol);

}  // namespace nlsnorm
