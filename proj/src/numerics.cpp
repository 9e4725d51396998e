#include "qkd/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace qkd {

LogEps LogEps::from_epsilon(double eps) {
  if (!(eps > 0.0) || eps > 1.0)
    throw std::domain_error("LogEps: eps must lie in (0, 1]");
  return LogEps{-std::log(eps)};
}

LogEps LogEps::from_t(double t) {
  if (!(t >= 0.0)) throw std::domain_error("LogEps: t must be >= 0");
  return LogEps{t};
}

LogEps LogEps::times(double k) const {
  if (!(k >= 1.0)) throw std::domain_error("LogEps::times: k must be >= 1");
  const double lk = std::log(k);
  if (t < lk) throw std::domain_error("LogEps::times: k * eps exceeds 1");
  return LogEps{t - lk};
}

double LogEps::epsilon() const { return std::exp(-t); }

double h2(double x) {
  // collapse rounding residue at the endpoints to the limit value
  if (x > -1e-15 && x < 1e-15) x = 0.0;
  if (x > 1.0 - 1e-15 && x < 1.0 + 1e-15) x = 1.0;
  if (x < 0.0 || x > 1.0) throw std::domain_error("h2: argument outside [0, 1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -(x * std::log2(x) + (1.0 - x) * std::log2(1.0 - x));
}

double ln_gamma(double z) {
  if (!(z > 0.0)) throw std::domain_error("ln_gamma: argument must be > 0");
#if defined(__GLIBC__)
  int sign = 0;  // lgamma_r avoids the signgam global of plain lgamma
  return ::lgamma_r(z, &sign);
#else
  return std::lgamma(z);
#endif
}

}  // namespace qkd
