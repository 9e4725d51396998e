#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "qkd/numerics.hpp"

using namespace qkd;

TEST_SUITE("numerics") {

TEST_CASE("h2 endpoint and reference values") {
  CHECK(h2(0.0) == 0.0);
  CHECK(h2(1.0) == 0.0);
  CHECK(h2(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  // reference: tests/oracle/reference_values.py
  CHECK(h2(0.11) == doctest::Approx(0.499915958164528).epsilon(1e-12));
  CHECK(h2(0.3) == doctest::Approx(0.881290899230693).epsilon(1e-12));
}

TEST_CASE("h2 clamps rounding residue at the endpoints") {
  CHECK(h2(-1e-16) == 0.0);
  CHECK(h2(1.0 + 1e-16) == 0.0);
  CHECK_THROWS_AS(h2(-0.01), std::domain_error);
  CHECK_THROWS_AS(h2(1.01), std::domain_error);
}

TEST_CASE("h2 is symmetric and concave") {
  for (int i = 1; i < 1000; ++i) {
    const double x = i / 1000.0;
    CHECK(h2(x) == doctest::Approx(h2(1.0 - x)).epsilon(1e-12));
  }
  // midpoint concavity on a coarse grid
  for (int i = 1; i + 2 < 100; ++i) {
    const double a = i / 100.0, b = (i + 2) / 100.0;
    CHECK(h2((a + b) / 2.0) >= 0.5 * (h2(a) + h2(b)) - 1e-12);
  }
}

TEST_CASE("ln_gamma reference values") {
  CHECK(ln_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(ln_gamma(2.0) == doctest::Approx(0.0).epsilon(1e-14));
  // ln(63!), reference: tests/oracle/reference_values.py
  CHECK(ln_gamma(64.0) == doctest::Approx(201.009316399282).epsilon(1e-12));
  CHECK(ln_gamma(0.5) == doctest::Approx(0.5 * std::log(std::acos(-1.0))).epsilon(1e-12));
  CHECK_THROWS_AS(ln_gamma(0.0), std::domain_error);
  CHECK_THROWS_AS(ln_gamma(-3.0), std::domain_error);
}

TEST_CASE("ln_gamma recurrence over [1, 1e6]") {
  for (double z = 1.0; z <= 1e6; z *= 1.7) {
    const double lhs = ln_gamma(z + 1.0);
    const double rhs = ln_gamma(z) + std::log(z);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("LogEps construction and combination") {
  CHECK(LogEps::from_epsilon(1.0).t == 0.0);
  CHECK(LogEps::from_epsilon(1e-10).t == doctest::Approx(std::log(1e10)));
  CHECK_THROWS_AS(LogEps::from_epsilon(0.0), std::domain_error);
  CHECK_THROWS_AS(LogEps::from_epsilon(1.5), std::domain_error);
  CHECK_THROWS_AS(LogEps::from_t(-1.0), std::domain_error);

  const LogEps e = LogEps::from_epsilon(0.01);
  CHECK(e.times(3.0).t == doctest::Approx(std::log(100.0) - std::log(3.0)));
  CHECK_THROWS_AS(LogEps::from_epsilon(0.9).times(2.0), std::domain_error);
}

}  // TEST_SUITE
