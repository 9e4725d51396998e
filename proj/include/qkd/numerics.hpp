#pragma once

namespace qkd {

/// A failure probability carried as t = ln(1/eps).
///
/// The estimation chain multiplies failure probabilities by factors whose
/// logarithms exceed 2e5, so the linear values underflow any float type.
/// All epsilon arithmetic therefore stays in this log domain; epsilon() is
/// for display only and may underflow to zero.
struct LogEps {
  double t = 0.0;  // ln(1/eps), >= 0; t == 0 means eps == 1

  static LogEps from_epsilon(double eps);  // eps in (0, 1]
  static LogEps from_t(double t);          // t >= 0

  /// eps_c = k * eps for k >= 1. Valid only while t >= ln(k).
  LogEps times(double k) const;

  double epsilon() const;
};

/// Binary Shannon entropy in bits, h2(x) = -x log2 x - (1-x) log2(1-x).
/// Inputs within 1e-15 of an endpoint collapse to the limit value 0.
double h2(double x);

/// ln Gamma(z) for z > 0.
double ln_gamma(double z);

}  // namespace qkd
