#pragma once

#include <array>
#include <optional>

#include "qkd/channel.hpp"
#include "qkd/definetti.hpp"
#include "qkd/keyrate.hpp"

namespace qkd {

/// Decoy-estimated lower bounds on the single-photon click rates q01 and q10,
/// clamped to [0, 1]. The 2+-photon rates are already eliminated by their
/// worst-case substitution.
struct NppDecoyBounds {
  double q01_lower = 0.0;
  double q10_lower = 0.0;
};

/// Three-intensity decoy estimation. With the decoy mixture weights
/// {e^-nu, nu e^-nu, 1 - e^-nu - nu e^-nu}:
///   q01 >= [Cher_low(n_0nu)/(N(1-p)^2 p0(1-p0)) - e^-nu q00_up - tail] / (nu e^-nu)
/// where q00_up = Cher_up(n_00)/(N(1-p)^2 p0^2), and symmetrically for q10.
NppDecoyBounds npp_decoy_bounds(const NppObservation& obs, double n_pulses,
                                double p, double p0, double nu, LogEps t0,
                                ClampMask* clamps = nullptr);

/// Lower bound on the per-round phase-correct probability,
///   p^2 [max(0, A sqrt(q01) - B)]^2 + p^2 [max(0, A sqrt(q10) - B)]^2
/// with A = sqrt(e^{-2mu} mu) and B = sqrt(e^{-2mu}(sinh mu cosh mu - mu)).
/// B absorbs the multi-photon remainder at its worst-case click rate 1.
double phase_correct_bound(double q01_lower, double q10_lower, double mu, double p,
                           ClampMask* clamps = nullptr);

/// Default allocation: eps_bar = eps_cor = eps_tot/3 and
/// 2 sqrt(4 eps0 g) = eps_tot/3, i.e. t0 = 2 ln(6/eps_tot) + ln 4 + ln g(N, 108^2).
EpsilonBudget npp_default_budget(LogEps eps_tot, double n_pulses,
                                 PenaltyMode mode = PenaltyMode::kExact);

/// fractions = {eps_bar, eps_cor, de Finetti term}; normalized to sum to 1.
EpsilonBudget npp_budget_from_fractions(LogEps eps_tot,
                                        const std::array<double, 3>& fractions,
                                        double n_pulses, PenaltyMode mode,
                                        std::optional<double> known_ln_g = std::nullopt);

/// Key length
///   l = n_s (1 - h2(1 - n_cor/n_s) - f h2(e_bit))
///       - log2(2/eps_cor) - 2 log2(1/(2 eps_bar)),
/// with n_cor = min(n_s, cher_low(N * p_cor, eps0)), floored at 0. Once the
/// implied phase-error ratio 1 - n_cor/n_s reaches 1/2 the entropy bound is
/// vacuous and the key is forced to 0. n_s == 0 yields a flagged zero-key
/// result.
KeyRateResult npp_key_length(const NppObservation& obs, double p_cor,
                             const GlobalParams& g, const EpsilonBudget& budget);

}  // namespace qkd
