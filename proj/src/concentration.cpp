#include "qkd/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qkd {

namespace {

void check_count(double value, const char* what) {
  if (!(value >= 0.0)) throw std::domain_error(std::string(what) + " must be >= 0");
}

// sqrt(t^2 + c*v*t), factoring out the dominant operand: at the t ~ 1e5
// values this engine produces a naive t*t + c*v*t loses the small term.
double sqrt_quad(double t, double c, double v) {
  if (t <= 0.0) return 0.0;
  if (t > v) return t * std::sqrt(1.0 + c * v / t);
  return std::sqrt(t * (t + c * v));
}

}  // namespace

double observation_upper(double expectation, LogEps eps) {
  check_count(expectation, "observation_upper: expectation");
  const double t = eps.t;
  return expectation + 0.5 * t + 0.5 * sqrt_quad(t, 8.0, expectation);
}

double observation_lower(double expectation, LogEps eps) {
  check_count(expectation, "observation_lower: expectation");
  const double t = eps.t;
  if (t == 0.0 || expectation == 0.0) return expectation;
  // E - sqrt(2Et) rationalized to E(E - 2t)/(E + sqrt(2Et)): near E = 2t the
  // direct difference loses the leading digits.
  const double s = std::sqrt(2.0 * expectation * t);
  return std::max(0.0, expectation * (expectation - 2.0 * t) / (expectation + s));
}

double expectation_upper(double observation, LogEps eps) {
  check_count(observation, "expectation_upper: observation");
  const double t = eps.t;
  return observation + t + sqrt_quad(t, 2.0, observation);
}

double expectation_lower(double observation, LogEps eps) {
  check_count(observation, "expectation_lower: observation");
  const double t = eps.t;
  if (t == 0.0) return observation;
  // X + (t - s)/2 rationalized to X - 4Xt/(t + s): the direct difference
  // cancels catastrophically once t >> X.
  const double s = sqrt_quad(t, 8.0, observation);
  return std::max(0.0, observation - 4.0 * observation * t / (t + s));
}

}  // namespace qkd
