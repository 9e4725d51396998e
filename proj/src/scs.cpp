#include "qkd/scs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qkd/concentration.hpp"

namespace qkd {

namespace {

void set_clamp(ClampMask* clamps, ClampMask bit) {
  if (clamps) *clamps |= bit;
}

double capped_probability(double v, ClampMask* clamps) {
  if (v > 1.0) {
    set_clamp(clamps, kClampPhaseProbCapped);
    return 1.0;
  }
  return v;
}

}  // namespace

ScsSourceSpec ScsSourceSpec::perfect(double mu) {
  if (!(mu >= 0.0)) throw std::domain_error("ScsSourceSpec: mu must be >= 0");
  const double a0 = std::exp(-mu);
  if (a0 < 0.5)
    throw std::domain_error("ScsSourceSpec: mu too large for a valid vacuum projection");
  return {a0, 1.0, a0, 1.0};
}

double effective_intensity(double a0, double a_v0) {
  if (!(a0 >= 0.5 && a0 <= 1.0) || !(a_v0 >= 0.5 && a_v0 <= 1.0))
    throw std::domain_error("effective_intensity: projections must lie in [0.5, 1]");
  const double amp = std::sqrt(a0 * a_v0) - std::sqrt((1.0 - a0) * (1.0 - a_v0));
  const double overlap = amp * amp;
  if (overlap <= 0.0)
    throw std::domain_error("effective_intensity: mapped intensity diverges");
  return -std::log(overlap);
}

ScsCoefficients scs_coefficients(double mu_a, double mu_b,
                                 std::optional<double> c0_override) {
  if (!(mu_a > 0.0) || !(mu_b > 0.0))
    throw std::domain_error("scs_coefficients: intensities must be > 0");
  ScsCoefficients c;
  c.mu_a = mu_a;
  c.mu_b = mu_b;
  c.c0 = c0_override.value_or(std::exp(-(mu_a + mu_b) / 4.0));
  if (!(c.c0 > 0.0)) throw std::domain_error("scs_coefficients: c0 must be > 0");
  c.c1 = 1.0 / c.c0;
  // c0 + c1 >= 2 >= 2 e^{-mu/2}, so both factors are non-negative
  const double fa = c.c0 + c.c1 - 2.0 * std::exp(-mu_a / 2.0);
  const double fb = c.c0 + c.c1 - 2.0 * std::exp(-mu_b / 2.0);
  c.c_bar2 = std::sqrt(std::max(0.0, fa * fb));
  return c;
}

double phase_error_prob_bound(double p_o, double p_b, double p,
                              const ScsCoefficients& c, ClampMask* clamps) {
  if (!(p_o >= 0.0 && p_o <= 1.0) || !(p_b >= 0.0 && p_b <= 1.0))
    throw std::domain_error("phase_error_prob_bound: probabilities outside [0, 1]");
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("phase_error_prob_bound: p must lie in (0, 1)");
  const double q = 1.0 - p;
  const double ro = p_o / (q * q);  // click rates of the decomposition states
  const double rb = p_b / (p * p);
  const double sum = c.c0 * c.c0 * ro + c.c1 * c.c1 * rb + c.c_bar2 * c.c_bar2 +
                     2.0 * c.c0 * c.c1 * std::sqrt(ro * rb) +
                     c.c0 * c.c_bar2 * std::sqrt(ro) +
                     c.c1 * c.c_bar2 * std::sqrt(rb);
  return capped_probability(0.5 * p * q * sum, clamps);
}

double estimate_phase_errors(const ScsObservation& obs, double n_pulses, double p,
                             const ScsCoefficients& c, LogEps t0, ClampMask* clamps) {
  if (!(n_pulses >= 1.0))
    throw std::domain_error("estimate_phase_errors: N must be >= 1");
  const double p_o = capped_probability(expectation_upper(obs.n_O, t0) / n_pulses, clamps);
  const double p_b = capped_probability(expectation_upper(obs.n_B, t0) / n_pulses, clamps);
  const double p_ph = phase_error_prob_bound(p_o, p_b, p, c, clamps);
  double n_ph = observation_upper(n_pulses * p_ph, t0);
  if (n_ph > obs.n_Z) {
    set_clamp(clamps, kClampPhaseCountCapped);
    n_ph = obs.n_Z;
  }
  return n_ph;
}

EpsilonBudget scs_default_budget(LogEps eps_tot, double n_pulses, PenaltyMode mode) {
  return scs_budget_from_fractions(eps_tot, {0.25, 0.25, 0.25, 0.25}, n_pulses, mode);
}

EpsilonBudget scs_budget_from_fractions(LogEps eps_tot,
                                        const std::array<double, 4>& fractions,
                                        double n_pulses, PenaltyMode mode,
                                        std::optional<double> known_ln_g) {
  double total = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0)) throw std::domain_error("scs budget: fractions must be > 0");
    total += f;
  }
  const double t_tot = eps_tot.t;
  EpsilonBudget b;
  b.t_bar = LogEps::from_t(t_tot - std::log(fractions[0] / total));
  b.t_cor = LogEps::from_t(t_tot - std::log(fractions[1] / total));
  b.t_prime = LogEps::from_t(t_tot - std::log(fractions[2] / total / 2.0));
  b.uses_prime = true;
  b.k_uses = 3;
  b.penalty_mode = mode;
  const double x = DimensionSpec::scs().x();
  b.ln_g = known_ln_g ? *known_ln_g
                      : (mode == PenaltyMode::kExact ? ln_g(n_pulses, x)
                                                     : ln_g_bound(n_pulses, x));
  // 2 sqrt(k eps0 g) = fraction * eps_tot  <=>  t_target = 2 ln(2/(f eps_tot))
  const LogEps target = LogEps::from_t(2.0 * (t_tot - std::log(fractions[3] / total / 2.0)));
  b.t0 = lift_budget_with_penalty(target, b.k_uses, b.ln_g);
  return b;
}

KeyRateResult scs_key_length(const ScsObservation& obs, double n_ph_bar,
                             const GlobalParams& g, const EpsilonBudget& budget) {
  if (!(n_ph_bar >= 0.0) || n_ph_bar > obs.n_Z * (1.0 + 1e-12))
    throw std::domain_error("scs_key_length: need 0 <= n_ph_bar <= n_Z");

  KeyRateResult r;
  r.budget = budget;

  const double ln2 = std::numbers::ln2;
  const double c_smooth = budget.asymptotic ? 0.0 : 1.0 + 2.0 * budget.t_prime.t / ln2;
  const double c_cor = budget.asymptotic ? 0.0 : 1.0 + budget.t_cor.t / ln2;
  const double c_hash = budget.asymptotic ? 0.0 : 2.0 * budget.t_bar.t / ln2 - 2.0;

  const double ratio = obs.n_Z > 0.0 ? std::min(1.0, n_ph_bar / obs.n_Z) : 1.0;
  double entropy_term;
  if (ratio >= 0.5) {
    // h2 is no longer an upper bound past 1/2; the max-entropy estimate
    // saturates at n_Z and no key survives
    r.clamps |= kClampEntropyHalf;
    entropy_term = obs.n_Z;
  } else {
    entropy_term = obs.n_Z * h2(ratio);
  }
  const double leak_ec = g.f * obs.n_t * h2(obs.e_bit);

  double l = obs.n_Z - entropy_term - leak_ec - c_smooth - c_cor - c_hash;
  if (l < 0.0) {
    r.clamps |= kClampKeyFloored;
    l = 0.0;
  }
  r.l = l;
  r.rate = l / g.N;
  r.terms = {{"n_O", obs.n_O},
             {"n_B", obs.n_B},
             {"n_Z", obs.n_Z},
             {"n_t", obs.n_t},
             {"e_bit", obs.e_bit},
             {"n_ph_bar", n_ph_bar},
             {"phase_ratio", ratio},
             {"phase_entropy", entropy_term},
             {"ec_leakage", leak_ec},
             {"const_smoothing", c_smooth},
             {"const_correctness", c_cor},
             {"const_hashing", c_hash}};
  return r;
}

}  // namespace qkd
