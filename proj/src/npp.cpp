#include "qkd/npp.hpp"

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

// sinh(mu) cosh(mu) - mu = (sinh(2 mu) - 2 mu) / 2; the direct difference
// cancels below mu ~ 0.05, so switch to the odd series of sinh there.
double sinh_cosh_minus_mu(double mu) {
  const double x = 2.0 * mu;
  if (x < 0.1) {
    const double x2 = x * x;
    return 0.5 * (x * x2 / 6.0) * (1.0 + x2 / 20.0 + x2 * x2 / 840.0 + x2 * x2 * x2 / 60480.0);
  }
  return 0.5 * (std::sinh(x) - x);
}

}  // namespace

NppDecoyBounds npp_decoy_bounds(const NppObservation& obs, double n_pulses,
                                double p, double p0, double nu, LogEps t0,
                                ClampMask* clamps) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("npp_decoy_bounds: p outside (0, 1)");
  if (!(p0 > 0.0 && p0 < 1.0))
    throw std::domain_error("npp_decoy_bounds: p0 outside (0, 1)");
  if (!(nu > 0.0)) throw std::domain_error("npp_decoy_bounds: nu must be > 0");
  if (!(n_pulses >= 1.0)) throw std::domain_error("npp_decoy_bounds: N must be >= 1");

  const double q = (1.0 - p) * (1.0 - p);
  const double e_nu = std::exp(-nu);
  const double tail = e_nu * (std::expm1(nu) - nu);  // 1 - e^-nu - nu e^-nu
  const double q00_upper = expectation_upper(obs.n_00, t0) / (n_pulses * q * p0 * p0);

  const auto lower = [&](double clicks) {
    const double rate = expectation_lower(clicks, t0) / (n_pulses * q * p0 * (1.0 - p0));
    double v = (rate - e_nu * q00_upper - tail) / (e_nu * nu);
    if (v < 0.0) {
      set_clamp(clamps, kClampDecoyFloored);
      v = 0.0;
    } else if (v > 1.0) {
      set_clamp(clamps, kClampDecoyCapped);
      v = 1.0;
    }
    return v;
  };

  return {lower(obs.n_0nu), lower(obs.n_nu0)};
}

double phase_correct_bound(double q01_lower, double q10_lower, double mu, double p,
                           ClampMask* clamps) {
  if (!(q01_lower >= 0.0 && q01_lower <= 1.0) || !(q10_lower >= 0.0 && q10_lower <= 1.0))
    throw std::domain_error("phase_correct_bound: click rates outside [0, 1]");
  if (!(mu > 0.0)) throw std::domain_error("phase_correct_bound: mu must be > 0");
  const double decay = std::exp(-2.0 * mu);
  const double a = std::sqrt(decay * mu);
  const double b = std::sqrt(decay * sinh_cosh_minus_mu(mu));
  const auto arm = [&](double q_low) {
    const double v = a * std::sqrt(q_low) - b;
    if (v <= 0.0) {
      set_clamp(clamps, kClampPhaseCorTruncated);
      return 0.0;
    }
    return v * v;
  };
  return p * p * (arm(q01_lower) + arm(q10_lower));
}

EpsilonBudget npp_default_budget(LogEps eps_tot, double n_pulses, PenaltyMode mode) {
  return npp_budget_from_fractions(eps_tot, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
                                   n_pulses, mode);
}

EpsilonBudget npp_budget_from_fractions(LogEps eps_tot,
                                        const std::array<double, 3>& fractions,
                                        double n_pulses, PenaltyMode mode,
                                        std::optional<double> known_ln_g) {
  double total = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0)) throw std::domain_error("npp budget: fractions must be > 0");
    total += f;
  }
  const double t_tot = eps_tot.t;
  EpsilonBudget b;
  b.t_bar = LogEps::from_t(t_tot - std::log(fractions[0] / total));
  b.t_cor = LogEps::from_t(t_tot - std::log(fractions[1] / total));
  b.uses_prime = false;
  b.k_uses = 4;
  b.penalty_mode = mode;
  const double x = DimensionSpec::npp().x();
  b.ln_g = known_ln_g ? *known_ln_g
                      : (mode == PenaltyMode::kExact ? ln_g(n_pulses, x)
                                                     : ln_g_bound(n_pulses, x));
  const LogEps target = LogEps::from_t(2.0 * (t_tot - std::log(fractions[2] / total / 2.0)));
  b.t0 = lift_budget_with_penalty(target, b.k_uses, b.ln_g);
  return b;
}

KeyRateResult npp_key_length(const NppObservation& obs, double p_cor,
                             const GlobalParams& g, const EpsilonBudget& budget) {
  if (!(p_cor >= 0.0 && p_cor <= 1.0))
    throw std::domain_error("npp_key_length: p_cor outside [0, 1]");

  KeyRateResult r;
  r.budget = budget;

  if (obs.n_s <= 0.0) {
    r.clamps |= kClampNoSignalClicks;
    r.terms = {{"n_s", 0.0}, {"n_cor", 0.0}};
    return r;
  }

  double n_cor = observation_lower(g.N * p_cor, budget.t0);
  if (n_cor > obs.n_s) {
    r.clamps |= kClampCorCountCapped;
    n_cor = obs.n_s;
  }
  const double e_ph = 1.0 - n_cor / obs.n_s;

  const double ln2 = std::numbers::ln2;
  const double c_cor = budget.asymptotic ? 0.0 : 1.0 + budget.t_cor.t / ln2;
  const double c_hash = budget.asymptotic ? 0.0 : 2.0 * budget.t_bar.t / ln2 - 2.0;

  double l;
  double entropy_term;
  if (e_ph >= 0.5) {
    // below half phase-correct events the max-entropy bound saturates
    r.clamps |= kClampEntropyHalf;
    entropy_term = 1.0;
    l = 0.0;
  } else {
    entropy_term = h2(e_ph);
    l = obs.n_s * (1.0 - entropy_term - g.f * h2(obs.e_bit)) - c_cor - c_hash;
  }
  if (l < 0.0) {
    r.clamps |= kClampKeyFloored;
    l = 0.0;
  }
  r.l = l;
  r.rate = l / g.N;
  r.terms = {{"n_00", obs.n_00},
             {"n_0nu", obs.n_0nu},
             {"n_nu0", obs.n_nu0},
             {"n_s", obs.n_s},
             {"e_bit", obs.e_bit},
             {"p_cor", p_cor},
             {"n_cor", n_cor},
             {"phase_error_ratio", e_ph},
             {"phase_entropy", entropy_term},
             {"ec_leakage", g.f * obs.n_s * h2(obs.e_bit)},
             {"const_correctness", c_cor},
             {"const_hashing", c_hash}};
  return r;
}

}  // namespace qkd
