#include "qkd/keyrate.hpp"

#include <algorithm>
#include <cmath>

namespace qkd {

std::vector<std::string> clamp_names(ClampMask mask) {
  static const std::pair<ClampMask, const char*> kNames[] = {
      {kClampPhaseProbCapped, "phase_prob_capped"},
      {kClampPhaseCountCapped, "n_ph_capped_at_n_Z"},
      {kClampEntropyHalf, "entropy_ratio_half"},
      {kClampKeyFloored, "key_floored"},
      {kClampDecoyFloored, "decoy_floored"},
      {kClampDecoyCapped, "decoy_capped"},
      {kClampPhaseCorTruncated, "phase_cor_truncated"},
      {kClampCorCountCapped, "n_cor_capped_at_n_s"},
      {kClampNoSignalClicks, "no_signal_clicks"},
  };
  std::vector<std::string> out;
  for (const auto& [bit, name] : kNames)
    if (mask & bit) out.emplace_back(name);
  return out;
}

double EpsilonBudget::ln_eps_tot_reconstructed() const {
  std::vector<double> logs;
  logs.push_back(-t_bar.t);
  logs.push_back(-t_cor.t);
  if (uses_prime) logs.push_back(std::log(2.0) - t_prime.t);
  if (k_uses > 0)
    logs.push_back(std::log(2.0) +
                   0.5 * (std::log(static_cast<double>(k_uses)) + ln_g - t0.t));
  const double m = *std::max_element(logs.begin(), logs.end());
  double acc = 0.0;
  for (double v : logs) acc += std::exp(v - m);
  return m + std::log(acc);
}

EpsilonBudget EpsilonBudget::asymptotic_budget() {
  EpsilonBudget b;
  b.asymptotic = true;
  return b;
}

}  // namespace qkd
