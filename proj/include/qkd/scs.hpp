#pragma once

#include <array>
#include <optional>

#include "qkd/channel.hpp"
#include "qkd/definetti.hpp"
#include "qkd/keyrate.hpp"

namespace qkd {

/// Vacuum-projection lower bounds of the two imperfect sources. All four
/// values live in [0.5, 1].
struct ScsSourceSpec {
  double a0 = 1.0;    // coherent-state preparation of Alice
  double a_v0 = 1.0;  // vacuum preparation of Alice
  double b0 = 1.0;
  double b_v0 = 1.0;

  /// A perfect source of intensity mu: a_v0 = 1, a0 = e^{-mu}.
  static ScsSourceSpec perfect(double mu);
};

/// Intensity of the perfect-state protocol an imperfect source maps to:
/// mu = -ln[(sqrt(a0 a_v0) - sqrt((1-a0)(1-a_v0)))^2].
/// Throws for arguments outside [0.5, 1] and for a0 = a_v0 = 0.5 (the mapped
/// intensity diverges).
double effective_intensity(double a0, double a_v0);

/// State-decomposition coefficients: c0 c1 = 1 and
/// c_bar2 = sqrt((c0 + c1 - 2 e^{-mu_a/2})(c0 + c1 - 2 e^{-mu_b/2})).
struct ScsCoefficients {
  double mu_a = 0.0;
  double mu_b = 0.0;
  double c0 = 1.0;
  double c1 = 1.0;
  double c_bar2 = 0.0;
};

/// Default c0 = e^{-(mu_a+mu_b)/4}; pass an override to tune it.
ScsCoefficients scs_coefficients(double mu_a, double mu_b,
                                 std::optional<double> c0_override = std::nullopt);

/// Per-round phase-error probability upper bound given the per-round
/// vacuum-vacuum and coherent-coherent click probabilities. Clamped to <= 1.
double phase_error_prob_bound(double p_o, double p_b, double p,
                              const ScsCoefficients& c, ClampMask* clamps = nullptr);

/// Chernoff chain: lifts the observed n_O, n_B to expectation upper bounds,
/// applies the phase-error probability bound, and converts back to a count
/// upper bound. Result is clamped to <= n_Z; degenerate inputs therefore
/// yield zero key downstream rather than an error.
double estimate_phase_errors(const ScsObservation& obs, double n_pulses, double p,
                             const ScsCoefficients& c, LogEps t0,
                             ClampMask* clamps = nullptr);

/// Default allocation: eps_bar = eps_cor = eps_tot/4, eps' = eps_tot/8 and
/// 2 sqrt(3 eps0 g) = eps_tot/4, i.e. t0 = 2 ln(8/eps_tot) + ln 3 + ln g(N, 64).
EpsilonBudget scs_default_budget(LogEps eps_tot, double n_pulses,
                                 PenaltyMode mode = PenaltyMode::kExact);

/// General allocation. fractions = {eps_bar, eps_cor, 2 eps', de Finetti term}
/// as shares of eps_tot; they are normalized to sum to 1. Callers evaluating
/// many splits can pass the penalty logarithm once instead of recomputing it.
EpsilonBudget scs_budget_from_fractions(LogEps eps_tot,
                                        const std::array<double, 4>& fractions,
                                        double n_pulses, PenaltyMode mode,
                                        std::optional<double> known_ln_g = std::nullopt);

/// Key length
///   l = n_Z - n_Z h2(n_ph_bar/n_Z) - f n_t h2(e_bit)
///       - log2(2/eps'^2) - log2(2/eps_cor) - 2 log2(1/(2 eps_bar)),
/// floored at 0, with the entropy term forced to n_Z once the phase-error
/// ratio reaches 1/2. Constants are computed from the LogEps values and are
/// dropped entirely in asymptotic budgets.
KeyRateResult scs_key_length(const ScsObservation& obs, double n_ph_bar,
                             const GlobalParams& g, const EpsilonBudget& budget);

}  // namespace qkd
