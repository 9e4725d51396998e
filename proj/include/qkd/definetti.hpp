#pragma once

#include "qkd/numerics.hpp"

namespace qkd {

/// Hilbert-space dimensions of the three parties. The penalty argument is
/// x = (d_A * d_B * d_C)^2.
struct DimensionSpec {
  int d_A = 2;
  int d_B = 2;
  int d_C = 2;

  double x() const {
    const double d = static_cast<double>(d_A) * d_B * d_C;
    return d * d;
  }

  static DimensionSpec scs() { return {2, 2, 2}; }  // x = 64
  static DimensionSpec npp() { return {6, 6, 3}; }  // x = 108^2 = 11664
};

/// How the penalty factor is evaluated: the exact binomial (tighter, default)
/// or the closed-form upper bound (e(N+x-1)/(x-1))^(x-1).
enum class PenaltyMode { kExact, kSimplified };

/// ln of binom(N+x-1, N), the factor multiplying a collective-attack failure
/// probability to make it valid against coherent attacks. Exact to better
/// than 1e-9 relative.
double ln_g(double n, double x);

/// ln of the simplified bound (x-1) * (1 + ln((N+x-1)/(x-1))). Always >= ln_g.
double ln_g_bound(double n, double x);

/// Converts a target coherent-attack failure budget into the per-use
/// collective-attack epsilon_0: solves k_uses * eps0 * g_{N,x} = eps_target,
/// i.e. t0 = t_target + ln g + ln k_uses.
LogEps lift_budget(LogEps target, int k_uses, double n, double x,
                   PenaltyMode mode = PenaltyMode::kExact);
LogEps lift_budget(LogEps target, int k_uses, double n, const DimensionSpec& dims,
                   PenaltyMode mode = PenaltyMode::kExact);

/// Same lift with an already-evaluated penalty logarithm.
LogEps lift_budget_with_penalty(LogEps target, int k_uses, double ln_g_value);

}  // namespace qkd
