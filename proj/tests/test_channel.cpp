#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "qkd/channel.hpp"

using namespace qkd;

namespace {

GlobalParams table1() {
  GlobalParams g;  // defaults are the reference parameter set
  return g;
}

}  // namespace

TEST_SUITE("channel") {

TEST_CASE("side transmittance") {
  GlobalParams g = table1();
  g.L = 0.0;
  CHECK(side_transmittance(g) == doctest::Approx(0.3).epsilon(1e-15));
  g.L = 100.0;
  CHECK(side_transmittance(g) == doctest::Approx(0.03).epsilon(1e-12));
  g.alpha_f = 0.0;
  g.L = 12345.0;
  CHECK(side_transmittance(g) == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("interfere basics") {
  // dark counts only
  const PortClicks dark = interfere(0.0, 0.0, RelPhase::kIncoherent, 0.04, 1e-9);
  CHECK(dark.left_only == doctest::Approx(1e-9 * (1.0 - 1e-9)).epsilon(1e-12));
  CHECK(dark.right_only == doctest::Approx(1e-9 * (1.0 - 1e-9)).epsilon(1e-12));

  // perfect destructive interference on the right port
  const PortClicks perfect = interfere(0.01, 0.01, RelPhase::kZero, 0.0, 0.0);
  CHECK(perfect.right_only == 0.0);
  CHECK(perfect.left_only > 0.0);

  // reference: tests/oracle/reference_values.py
  const PortClicks z = interfere(1.5e-3, 0.0, RelPhase::kIncoherent, 0.04, 1e-9);
  CHECK(z.right_only == doctest::Approx(7.49157739741774e-4).epsilon(1e-9));
  CHECK(z.left_only == doctest::Approx(z.right_only).epsilon(1e-12));

  const PortClicks s0 = interfere(1.5e-3, 1.5e-3, RelPhase::kZero, 0.04, 1e-9);
  CHECK(s0.left_only == doctest::Approx(2.87551269046802e-3).epsilon(1e-9));
  CHECK(s0.right_only == doctest::Approx(1.19648715064765e-4).epsilon(1e-9));
}

TEST_CASE("interfere symmetries") {
  for (double a : {0.0, 1e-4, 3e-3, 0.2}) {
    for (double b : {0.0, 2e-4, 1e-2}) {
      const PortClicks ab = interfere(a, b, RelPhase::kZero, 0.04, 1e-9);
      const PortClicks ba = interfere(b, a, RelPhase::kZero, 0.04, 1e-9);
      CHECK(ab.left_only == doctest::Approx(ba.left_only).epsilon(1e-12));
      CHECK(ab.right_only == doctest::Approx(ba.right_only).epsilon(1e-12));
      // phase pi mirrors phase 0 with the ports exchanged
      const PortClicks pi = interfere(a, b, RelPhase::kPi, 0.04, 1e-9);
      CHECK(pi.left_only == doctest::Approx(ab.right_only).epsilon(1e-12));
      CHECK(pi.right_only == doctest::Approx(ab.left_only).epsilon(1e-12));
      // probabilities sane
      CHECK(ab.left_only >= 0.0);
      CHECK(ab.right_only >= 0.0);
      CHECK(ab.left_only + ab.right_only <= 1.0);
    }
  }
}

TEST_CASE("scs expected counts at the reference point") {
  GlobalParams g = table1();
  g.L = 100.0;
  g.N = 1e12;
  const ScsObservation obs = scs_expected_counts(g, 0.05, 0.5);
  // reference: tests/oracle/reference_values.py
  CHECK(obs.n_O == doctest::Approx(249.99999975).epsilon(1e-9));
  CHECK(obs.n_Z == doctest::Approx(3.74578869870887e8).epsilon(1e-9));
  CHECK(obs.n_B == doctest::Approx(2.99121787661913e7).epsilon(1e-9));
  CHECK(obs.n_t == doctest::Approx(obs.n_O + obs.n_Z + obs.n_B).epsilon(1e-15));
  CHECK(obs.e_bit == doctest::Approx(0.0739507348291053).epsilon(1e-9));
}

TEST_CASE("scs expected counts: degenerate and near-degenerate channels") {
  GlobalParams g = table1();
  g.p_d = 0.0;
  // vanishing intensity leaves vanishing counts
  const ScsObservation tiny = scs_expected_counts(g, 1e-12, 0.5);
  CHECK(tiny.n_t > 0.0);
  CHECK(tiny.n_t < 1.0);
  CHECK(tiny.e_bit == doctest::Approx((tiny.n_B + tiny.n_O) / tiny.n_t));
  // e_bit = 0 without darks or misalignment
  g.e_d = 0.0;
  const ScsObservation clean = scs_expected_counts(g, 0.05, 0.5);
  CHECK(clean.n_O == 0.0);
  CHECK(clean.n_B == 0.0);
  CHECK(clean.e_bit == 0.0);
  // an exactly click-free channel is an error
  g.eta_d = 0.0;
  CHECK_THROWS_AS(scs_expected_counts(g, 0.05, 0.5), std::domain_error);
}

TEST_CASE("expected counts scale linearly in N") {
  GlobalParams g = table1();
  g.L = 50.0;
  g.N = 1e10;
  const ScsObservation a = scs_expected_counts(g, 0.02, 0.3);
  g.N = 1e12;
  const ScsObservation b = scs_expected_counts(g, 0.02, 0.3);
  CHECK(b.n_O == doctest::Approx(100.0 * a.n_O).epsilon(1e-12));
  CHECK(b.n_Z == doctest::Approx(100.0 * a.n_Z).epsilon(1e-12));
  CHECK(b.n_B == doctest::Approx(100.0 * a.n_B).epsilon(1e-12));
  CHECK(b.e_bit == doctest::Approx(a.e_bit).epsilon(1e-12));

  g.N = 1e13;
  const NppObservation na = npp_expected_counts(g, 0.01, 0.005, 0.5, 0.5);
  g.N = 2e13;
  const NppObservation nb = npp_expected_counts(g, 0.01, 0.005, 0.5, 0.5);
  CHECK(nb.n_0nu == doctest::Approx(2.0 * na.n_0nu).epsilon(1e-12));
  CHECK(nb.n_s == doctest::Approx(2.0 * na.n_s).epsilon(1e-12));
}

TEST_CASE("npp expected counts at the reference point") {
  GlobalParams g = table1();
  g.L = 100.0;
  g.N = 1e13;
  const NppObservation obs = npp_expected_counts(g, 0.05, 0.1, 0.5, 0.5);
  // reference: tests/oracle/reference_values.py
  CHECK(obs.n_00 == doctest::Approx(1249.99999875).epsilon(1e-9));
  CHECK(obs.n_0nu == doctest::Approx(1.87078741230720e9).epsilon(1e-9));
  CHECK(obs.n_nu0 == doctest::Approx(obs.n_0nu).epsilon(1e-12));
  CHECK(obs.n_s == doctest::Approx(7.48790351383195e9).epsilon(1e-9));
  CHECK(obs.e_bit == doctest::Approx(0.0399473346724304).epsilon(1e-9));
}

TEST_CASE("npp dark-count algebra for n_00") {
  GlobalParams g = table1();
  g.N = 1e13;
  const double p = 0.5, p0 = 0.5;
  const NppObservation obs = npp_expected_counts(g, 0.05, 0.1, p, p0);
  const double expected =
      2.0 * g.p_d * (1.0 - g.p_d) * g.N * (1.0 - p) * (1.0 - p) * p0 * p0;
  CHECK(obs.n_00 == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("npp e_bit vanishes on a clean channel") {
  GlobalParams g = table1();
  g.p_d = 0.0;
  g.e_d = 0.0;
  const NppObservation obs = npp_expected_counts(g, 0.05, 0.1, 0.5, 0.5);
  CHECK(obs.e_bit == 0.0);
}

TEST_CASE("mc sampler: determinism, zero cases, agreement") {
  GlobalParams g = table1();
  g.L = 50.0;
  const ScsPulseParams sp{0.05, 0.3};

  const ScsObservation a = mc_sample_scs(g, sp, 200000, 12345);
  const ScsObservation b = mc_sample_scs(g, sp, 200000, 12345);
  CHECK(a.n_O == b.n_O);
  CHECK(a.n_Z == b.n_Z);
  CHECK(a.n_B == b.n_B);

  const ScsObservation none = mc_sample_scs(g, sp, 0, 7);
  CHECK(none.n_t == 0.0);

  GlobalParams quiet = g;
  quiet.p_d = 0.0;
  const ScsObservation silent = mc_sample_scs(quiet, ScsPulseParams{0.0, 0.3}, 100000, 9);
  CHECK(silent.n_t == 0.0);
  CHECK(silent.e_bit == 0.0);

  // counts track expectations within 4 sigma for a handful of seeds
  g.N = 1000000.0;
  const ScsObservation expd = scs_expected_counts(g, sp.mu, sp.p);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const ScsObservation m = mc_sample_scs(g, sp, 1000000, derive_seed(42, s));
    CHECK(std::abs(m.n_Z - expd.n_Z) <= 4.0 * std::sqrt(expd.n_Z));
    CHECK(std::abs(m.n_B - expd.n_B) <= 4.0 * std::sqrt(expd.n_B));
  }

  // shards with derived seeds still track expectations when summed
  ScsObservation sum{};
  for (std::uint64_t s = 0; s < 4; ++s) {
    const ScsObservation m = mc_sample_scs(g, sp, 250000, derive_seed(99, s));
    sum.n_O += m.n_O;
    sum.n_Z += m.n_Z;
    sum.n_B += m.n_B;
  }
  CHECK(std::abs(sum.n_Z - expd.n_Z) <= 4.0 * std::sqrt(expd.n_Z));

  CHECK_THROWS_AS(mc_sample_scs(g, sp, 200000001, 1), std::domain_error);
}

TEST_CASE("mc sampler: npp classes track expectations") {
  GlobalParams g = table1();
  g.L = 50.0;
  g.N = 1000000.0;
  const NppPulseParams np{0.05, 0.1, 0.5, 0.5};
  const NppObservation expd = npp_expected_counts(g, np.mu, np.nu, np.p, np.p0);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const NppObservation m = mc_sample_npp(g, np, 1000000, derive_seed(7, s));
    CHECK(std::abs(m.n_0nu - expd.n_0nu) <= 4.0 * std::sqrt(expd.n_0nu));
    CHECK(std::abs(m.n_nu0 - expd.n_nu0) <= 4.0 * std::sqrt(expd.n_nu0));
    CHECK(std::abs(m.n_s - expd.n_s) <= 4.0 * std::sqrt(expd.n_s));
    // error fraction close to the model e_bit
    const double err_sigma =
        std::sqrt(expd.e_bit * (1.0 - expd.e_bit) / expd.n_s);
    CHECK(std::abs(m.e_bit - expd.e_bit) <= 5.0 * err_sigma);
  }
}

TEST_CASE("parameter validation") {
  GlobalParams g = table1();
  g.e_d = 1.5;
  CHECK_THROWS_AS(g.validate(), std::domain_error);
  g = table1();
  g.f = 0.5;
  CHECK_THROWS_AS(g.validate(), std::domain_error);
  g = table1();
  CHECK_THROWS_AS(scs_expected_counts(g, -0.1, 0.5), std::domain_error);
  CHECK_THROWS_AS(scs_expected_counts(g, 0.1, 0.0), std::domain_error);
  CHECK_THROWS_AS(npp_expected_counts(g, 0.1, -0.1, 0.5, 0.5), std::domain_error);
}

}  // TEST_SUITE
