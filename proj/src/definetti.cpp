#include "qkd/definetti.hpp"

#include <cmath>
#include <stdexcept>

namespace qkd {

double ln_g(double n, double x) {
  if (!(n >= 1.0)) throw std::domain_error("ln_g: N must be >= 1");
  if (!(x >= 2.0)) throw std::domain_error("ln_g: x must be >= 2");
  // ln binom(N+x-1, N) = lgamma(N+x) - lgamma(N+1) - lgamma(x). For N >> x
  // that difference of two ~N ln N terms cancels down to ~x ln N and double
  // lgamma cannot deliver 1e-9 relative, so for integer x up to 1e5 use the
  // equivalent compensated sum of ln((N+k)/k).
  if (x <= 1e5 && x == std::floor(x)) {
    double sum = 0.0, comp = 0.0;
    const auto terms = static_cast<long>(x) - 1;
    for (long k = 1; k <= terms; ++k) {
      const double term = std::log((n + static_cast<double>(k)) / static_cast<double>(k));
      const double y = term - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
    return sum;
  }
  return ln_gamma(n + x) - ln_gamma(n + 1.0) - ln_gamma(x);
}

double ln_g_bound(double n, double x) {
  if (!(x >= 2.0)) throw std::domain_error("ln_g_bound: x must be >= 2");
  return (x - 1.0) * (1.0 + std::log((n + x - 1.0) / (x - 1.0)));
}

LogEps lift_budget_with_penalty(LogEps target, int k_uses, double ln_g_value) {
  if (k_uses < 1) throw std::domain_error("lift_budget: k_uses must be >= 1");
  const double t0 = target.t + ln_g_value + std::log(static_cast<double>(k_uses));
  if (!(t0 >= 0.0))
    throw std::domain_error("lift_budget: target failure budget unachievable");
  return LogEps::from_t(t0);
}

LogEps lift_budget(LogEps target, int k_uses, double n, double x, PenaltyMode mode) {
  const double penalty = mode == PenaltyMode::kExact ? ln_g(n, x) : ln_g_bound(n, x);
  return lift_budget_with_penalty(target, k_uses, penalty);
}

LogEps lift_budget(LogEps target, int k_uses, double n, const DimensionSpec& dims,
                   PenaltyMode mode) {
  return lift_budget(target, k_uses, n, dims.x(), mode);
}

}  // namespace qkd
