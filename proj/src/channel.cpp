#include "qkd/channel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>

namespace qkd {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

constexpr std::uint64_t kMaxRounds = 100000000;  // desk-scale sampling cap

std::uint64_t splitmix64(std::uint64_t v) {
  v += 0x9E3779B97F4A7C15ull;
  v = (v ^ (v >> 30)) * 0xBF58476D1CE4E5B9ull;
  v = (v ^ (v >> 27)) * 0x94D049BB133111EBull;
  return v ^ (v >> 31);
}

// mt19937_64 with an implementation-independent uniform double in [0, 1).
struct Sampler {
  std::mt19937_64 eng;
  explicit Sampler(std::uint64_t seed) : eng(seed) {}
  double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
};

}  // namespace

void GlobalParams::validate() const {
  require(p_d >= 0.0 && p_d <= 1.0, "GlobalParams: p_d outside [0, 1]");
  require(e_d >= 0.0 && e_d <= 1.0, "GlobalParams: e_d outside [0, 1]");
  require(eta_d >= 0.0 && eta_d <= 1.0, "GlobalParams: eta_d outside [0, 1]");
  require(f >= 1.0, "GlobalParams: f must be >= 1");
  require(alpha_f >= 0.0, "GlobalParams: alpha_f must be >= 0");
  require(N >= 1.0, "GlobalParams: N must be >= 1");
  require(L >= 0.0, "GlobalParams: L must be >= 0");
}

double side_transmittance(const GlobalParams& g) {
  return g.eta_d * std::pow(10.0, -g.alpha_f * (g.L / 2.0) / 10.0);
}

PortClicks interfere(double alpha_sq, double beta_sq, RelPhase phase, double e_d,
                     double p_d) {
  require(alpha_sq >= 0.0 && beta_sq >= 0.0, "interfere: intensities must be >= 0");
  double il, ir;
  if (phase == RelPhase::kIncoherent) {
    il = ir = 0.5 * (alpha_sq + beta_sq);
  } else {
    const double sa = std::sqrt(alpha_sq), sb = std::sqrt(beta_sq);
    il = 0.5 * (sa + sb) * (sa + sb);
    ir = 0.5 * (sa - sb) * (sa - sb);
    if (phase == RelPhase::kPi) std::swap(il, ir);
  }
  const double mix_l = (1.0 - e_d) * il + e_d * ir;
  const double mix_r = (1.0 - e_d) * ir + e_d * il;
  const double quiet_l = (1.0 - p_d) * std::exp(-mix_l);  // no left click
  const double quiet_r = (1.0 - p_d) * std::exp(-mix_r);
  // 1 - (1-p_d) e^{-I} evaluated as -expm1(-I) + p_d e^{-I}: the directform
  // wipes out dark-count-level probabilities
  const double click_l = -std::expm1(-mix_l) + p_d * std::exp(-mix_l);
  const double click_r = -std::expm1(-mix_r) + p_d * std::exp(-mix_r);
  return {click_l * quiet_r, click_r * quiet_l};
}

ScsObservation scs_expected_counts(const GlobalParams& g, double mu, double p) {
  g.validate();
  require(mu > 0.0, "scs_expected_counts: mu must be > 0");
  require(p > 0.0 && p < 1.0, "scs_expected_counts: p must lie in (0, 1)");
  const double eta = side_transmittance(g);
  const double po = interfere(0.0, 0.0, RelPhase::kIncoherent, g.e_d, g.p_d).right_only;
  const double pz =
      interfere(eta * mu, 0.0, RelPhase::kIncoherent, g.e_d, g.p_d).right_only;
  const double pb =
      interfere(eta * mu, eta * mu, RelPhase::kZero, g.e_d, g.p_d).right_only;
  ScsObservation obs;
  obs.n_O = g.N * (1.0 - p) * (1.0 - p) * po;
  obs.n_Z = 2.0 * g.N * p * (1.0 - p) * pz;
  obs.n_B = g.N * p * p * pb;
  obs.n_t = obs.n_O + obs.n_B + obs.n_Z;
  if (obs.n_t <= 0.0)
    throw std::domain_error("scs_expected_counts: degenerate channel, no clicks");
  obs.e_bit = (obs.n_B + obs.n_O) / obs.n_t;
  return obs;
}

NppObservation npp_expected_counts(const GlobalParams& g, double mu, double nu,
                                   double p, double p0) {
  g.validate();
  require(mu > 0.0, "npp_expected_counts: mu must be > 0");
  require(nu > 0.0, "npp_expected_counts: nu must be > 0");
  require(p > 0.0 && p < 1.0, "npp_expected_counts: p must lie in (0, 1)");
  require(p0 >= 0.0 && p0 <= 1.0, "npp_expected_counts: p0 outside [0, 1]");
  const double eta = side_transmittance(g);
  const auto succ = [](PortClicks c) { return c.left_only + c.right_only; };
  const PortClicks vac = interfere(0.0, 0.0, RelPhase::kIncoherent, g.e_d, g.p_d);
  const PortClicks dec0n =
      interfere(0.0, eta * nu, RelPhase::kIncoherent, g.e_d, g.p_d);
  const PortClicks decn0 =
      interfere(eta * nu, 0.0, RelPhase::kIncoherent, g.e_d, g.p_d);
  const PortClicks sig0 =
      interfere(eta * mu, eta * mu, RelPhase::kZero, g.e_d, g.p_d);
  const PortClicks sigpi =
      interfere(eta * mu, eta * mu, RelPhase::kPi, g.e_d, g.p_d);
  const double q = (1.0 - p) * (1.0 - p);
  NppObservation obs;
  obs.n_00 = g.N * q * p0 * p0 * succ(vac);
  obs.n_0nu = g.N * q * p0 * (1.0 - p0) * succ(dec0n);
  obs.n_nu0 = g.N * q * p0 * (1.0 - p0) * succ(decn0);
  // signal-signal rounds split evenly between relative phase 0 and pi; a
  // right click on equal bits or a left click on opposite bits survives
  // Bob's flip as an error
  obs.n_s = g.N * p * p * 0.5 * (succ(sig0) + succ(sigpi));
  if (obs.n_s <= 0.0)
    throw std::domain_error("npp_expected_counts: degenerate channel, no clicks");
  obs.e_bit = (sig0.right_only + sigpi.left_only) / (succ(sig0) + succ(sigpi));
  return obs;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t shard) {
  return splitmix64(seed ^ splitmix64(shard + 1));
}

ScsObservation mc_sample_scs(const GlobalParams& g, const ScsPulseParams& sp,
                             std::uint64_t rounds, std::uint64_t seed) {
  g.validate();
  require(rounds <= kMaxRounds, "mc_sample_scs: rounds above the sampling cap");
  require(sp.mu >= 0.0, "mc_sample_scs: mu must be >= 0");
  require(sp.p >= 0.0 && sp.p <= 1.0, "mc_sample_scs: p outside [0, 1]");
  const double eta = side_transmittance(g);
  // case index = number of coherent-state senders
  const double click_prob[3] = {
      interfere(0.0, 0.0, RelPhase::kIncoherent, g.e_d, g.p_d).right_only,
      interfere(eta * sp.mu, 0.0, RelPhase::kIncoherent, g.e_d, g.p_d).right_only,
      interfere(eta * sp.mu, eta * sp.mu, RelPhase::kZero, g.e_d, g.p_d).right_only,
  };
  Sampler rng(seed);
  std::uint64_t n_o = 0, n_z = 0, n_b = 0;
  for (std::uint64_t i = 0; i < rounds; ++i) {
    const int alice = rng.uniform() < sp.p ? 1 : 0;
    const int bob = rng.uniform() < sp.p ? 1 : 0;
    const int senders = alice + bob;
    if (rng.uniform() < click_prob[senders]) {
      if (senders == 0)
        ++n_o;
      else if (senders == 1)
        ++n_z;
      else
        ++n_b;
    }
  }
  ScsObservation obs;
  obs.n_O = static_cast<double>(n_o);
  obs.n_Z = static_cast<double>(n_z);
  obs.n_B = static_cast<double>(n_b);
  obs.n_t = obs.n_O + obs.n_B + obs.n_Z;
  obs.e_bit = obs.n_t > 0.0 ? (obs.n_B + obs.n_O) / obs.n_t : 0.0;
  return obs;
}

NppObservation mc_sample_npp(const GlobalParams& g, const NppPulseParams& np,
                             std::uint64_t rounds, std::uint64_t seed) {
  g.validate();
  require(rounds <= kMaxRounds, "mc_sample_npp: rounds above the sampling cap");
  require(np.mu >= 0.0 && np.nu >= 0.0, "mc_sample_npp: intensities must be >= 0");
  require(np.p >= 0.0 && np.p <= 1.0, "mc_sample_npp: p outside [0, 1]");
  require(np.p0 >= 0.0 && np.p0 <= 1.0, "mc_sample_npp: p0 outside [0, 1]");
  const double eta = side_transmittance(g);
  const PortClicks vac = interfere(0.0, 0.0, RelPhase::kIncoherent, g.e_d, g.p_d);
  const PortClicks dec0n =
      interfere(0.0, eta * np.nu, RelPhase::kIncoherent, g.e_d, g.p_d);
  const PortClicks decn0 =
      interfere(eta * np.nu, 0.0, RelPhase::kIncoherent, g.e_d, g.p_d);
  const PortClicks sig0 =
      interfere(eta * np.mu, eta * np.mu, RelPhase::kZero, g.e_d, g.p_d);
  const PortClicks sigpi =
      interfere(eta * np.mu, eta * np.mu, RelPhase::kPi, g.e_d, g.p_d);

  enum Choice { kSignal0, kSignal1, kVacuum, kDecoyNu };
  const auto draw_choice = [&](Sampler& rng) {
    if (rng.uniform() < np.p) return rng.uniform() < 0.5 ? kSignal0 : kSignal1;
    return rng.uniform() < np.p0 ? kVacuum : kDecoyNu;
  };

  Sampler rng(seed);
  std::uint64_t n_00 = 0, n_0n = 0, n_n0 = 0, n_s = 0, n_err = 0;
  for (std::uint64_t i = 0; i < rounds; ++i) {
    const Choice a = draw_choice(rng);
    const Choice b = draw_choice(rng);
    const bool a_sig = a == kSignal0 || a == kSignal1;
    const bool b_sig = b == kSignal0 || b == kSignal1;
    if (a_sig && b_sig) {
      const PortClicks& c = (a == b) ? sig0 : sigpi;
      const double u = rng.uniform();
      if (u < c.left_only + c.right_only) {
        ++n_s;
        const bool right = u >= c.left_only;
        if (right == (a == b)) ++n_err;  // Bob flips on right clicks
      }
    } else if (!a_sig && !b_sig) {
      const PortClicks* c = nullptr;
      std::uint64_t* bucket = nullptr;
      if (a == kVacuum && b == kVacuum) {
        c = &vac;
        bucket = &n_00;
      } else if (a == kVacuum && b == kDecoyNu) {
        c = &dec0n;
        bucket = &n_0n;
      } else if (a == kDecoyNu && b == kVacuum) {
        c = &decn0;
        bucket = &n_n0;
      } else {
        continue;  // nu-nu rounds are not used by the estimation
      }
      if (rng.uniform() < c->left_only + c->right_only) ++(*bucket);
    }
    // signal-decoy rounds are sifted away
  }
  NppObservation obs;
  obs.n_00 = static_cast<double>(n_00);
  obs.n_0nu = static_cast<double>(n_0n);
  obs.n_nu0 = static_cast<double>(n_n0);
  obs.n_s = static_cast<double>(n_s);
  obs.e_bit = n_s > 0 ? static_cast<double>(n_err) / static_cast<double>(n_s) : 0.0;
  return obs;
}

}  // namespace qkd
