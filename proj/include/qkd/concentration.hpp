#pragma once

#include "qkd/numerics.hpp"

namespace qkd {

// Multiplicative Chernoff estimators over counts, parameterized by the
// failure probability eps as t = ln(1/eps). Two directions:
//
//   observation_*  bound a yet-unseen observation X given its expectation E,
//   expectation_*  bound the unknown expectation E given an observation X.
//
// Each bound is violated with probability at most eps. Lower bounds clamp
// at 0 (counts cannot be negative); upper bounds are not clamped to any
// population size here because this layer does not know it.

/// X <= E + t/2 + sqrt(t^2 + 8 E t)/2 except with probability eps.
double observation_upper(double expectation, LogEps eps);

/// X >= max(0, E - sqrt(2 E t)) except with probability eps.
double observation_lower(double expectation, LogEps eps);

/// E <= X + t + sqrt(t^2 + 2 X t) except with probability eps.
double expectation_upper(double observation, LogEps eps);

/// E >= max(0, X + t/2 - sqrt(t^2 + 8 X t)/2) except with probability eps.
double expectation_lower(double observation, LogEps eps);

}  // namespace qkd
