#pragma once

#include "nlsnorm/energy.hpp"
#include "nlsnorm/grid_policy.hpp"
#include "nlsnorm/scalar_ground.hpp"

namespace nlsnorm
{

/// The β = 0 critical point (u_{a1}, u_{a2}) built from the two scalar ground
/// states, together with its level m1 + m2 and decay scales λ_{a_i}.
struct DecoupledPair
{
  GroundState ground1;
  GroundState ground2;
  double lambda1;  // λ_{a1} > 0
  double lambda2;
  double m1;
  double m2;
  State state;

  double level() const { return m1 + m2; }
};

/// grid == nullptr chooses a grid for the scales λ_{a_i} under policy.
DecoupledPair decoupled_pair(const SystemParams &params, GridPtr grid = nullptr,
                             const GridPolicy &policy = {});

/// Same, reusing already computed unit ground states.
DecoupledPair decoupled_pair(const SystemParams &params, const GroundState &g1,
                             const GroundState &g2, GridPtr grid = nullptr,
                             const GridPolicy &policy = {});

}  // namespace nlsnorm
