#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qkd/definetti.hpp"
#include "qkd/numerics.hpp"

namespace qkd {

// Clamp events recorded while evaluating a key length. Every clamp in the
// pipeline is explicit so diagnostics can show which bound was active.
enum Clamp : std::uint32_t {
  kClampPhaseProbCapped = 1u << 0,   // P_O, P_B or P_ph clipped at 1
  kClampPhaseCountCapped = 1u << 1,  // n_ph_bar clipped at n_Z
  kClampEntropyHalf = 1u << 2,       // phase-error ratio >= 1/2, key forced to 0
  kClampKeyFloored = 1u << 3,        // raw key length was negative
  kClampDecoyFloored = 1u << 4,      // q01/q10 intermediate went negative
  kClampDecoyCapped = 1u << 5,       // q01/q10 clipped at 1
  kClampPhaseCorTruncated = 1u << 6, // A*sqrt(q) <= B in one arm
  kClampCorCountCapped = 1u << 7,    // n_cor clipped at n_s
  kClampNoSignalClicks = 1u << 8,    // n_s == 0 (zero-key result)
};
using ClampMask = std::uint32_t;

std::vector<std::string> clamp_names(ClampMask mask);

/// The epsilon allocation composing eps_tot for one protocol instance. The
/// de Finetti contribution enters as 2*sqrt(k_uses * eps0 * g).
struct EpsilonBudget {
  LogEps t_bar;           // smoothing epsilon-bar
  LogEps t_cor;           // correctness epsilon
  LogEps t_prime;         // chain-rule epsilon' (unused by protocols without it)
  LogEps t0;              // per-Chernoff-use epsilon_0 after the de Finetti lift
  double ln_g = 0.0;      // penalty used in the lift
  int k_uses = 0;         // Chernoff uses covered by eps0
  PenaltyMode penalty_mode = PenaltyMode::kExact;
  bool uses_prime = false;
  bool asymptotic = false;  // infinite-key mode: no corrections, no constants

  /// ln of eps_bar + eps_cor (+ 2 eps') + 2 sqrt(k eps0 g), via log-sum-exp.
  double ln_eps_tot_reconstructed() const;

  static EpsilonBudget asymptotic_budget();
};

/// A key-length evaluation with full diagnostics: every subtractive term,
/// the epsilon budget it was computed under, and any clamps that fired.
struct KeyRateResult {
  double l = 0.0;     // secure key length, bits (floored at 0)
  double rate = 0.0;  // l / N
  std::map<std::string, double> params;  // chosen protocol parameters
  std::map<std::string, double> terms;   // named contributions and counts
  EpsilonBudget budget;
  ClampMask clamps = 0;

  std::vector<std::string> clamps_hit() const { return clamp_names(clamps); }
  bool zero_key() const { return l <= 0.0; }
};

}  // namespace qkd
