#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace nlsnorm
{

struct CheckEntry
{
  std::string name;
  double measured;
  double tolerance;
  bool passed;
  std::string note;
};

/// Mutation hook for testing the suite itself: the named cached norm
/// ("grad1", "grad2", "pow1", "pow2", "mixed", "mass1", "mass2") is scaled by
/// factor wherever a check evaluates a formula from cached norms.
struct CheckHooks
{
  std::string scale_norm;
  double factor = 1.0;
};

struct CheckReport
{
  std::string level;
  std::uint64_t seed;
  std::vector<CheckEntry> entries;

  bool passed() const;
  nlohmann::json to_json() const;
};

/// Quick: dilation laws, fiber identity at the formula level, decoupling,
/// label symmetry, zero state. Full adds the scalar closed forms and
/// rescaling law, resampled fiber derivatives, the residual gradient check,
/// GN sampling, multiplier extraction and the decoupled Newton root.
CheckReport check_suite(bool full, std::uint64_t seed = 1, const CheckHooks &hooks = {});

}  // namespace nlsnorm
