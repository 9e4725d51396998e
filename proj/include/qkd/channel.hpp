#pragma once

#include <cstdint>

#include "qkd/numerics.hpp"

namespace qkd {

/// Hardware and run configuration shared by both protocols.
struct GlobalParams {
  double p_d = 1e-9;      // dark-count probability per pulse per detector
  double e_d = 0.04;      // misalignment error rate
  double eta_d = 0.30;    // detector efficiency
  double f = 1.1;         // error-correction efficiency, >= 1
  double alpha_f = 0.2;   // fiber loss, dB/km
  LogEps eps_tot = LogEps::from_epsilon(1e-10);
  double N = 1e12;        // pulse-pair count
  double L = 0.0;         // total Alice-Bob distance, km

  void validate() const;  // throws std::domain_error on out-of-range fields
};

/// Source-to-detection transmittance of one arm (the measurement node sits
/// at the channel midpoint): eta = eta_d * 10^(-alpha_f * (L/2) / 10).
double side_transmittance(const GlobalParams& g);

enum class RelPhase { kZero, kPi, kIncoherent };

struct PortClicks {
  double left_only = 0.0;   // exclusive left-detector click probability
  double right_only = 0.0;  // exclusive right-detector click probability
};

/// Two attenuated inputs of intensity alpha_sq and beta_sq meet on a 50/50
/// beamsplitter. Relative phase 0 sends the light to the left port, pi to the
/// right, incoherent (phase-randomized or single-sided) input splits evenly.
/// Misalignment mixes the port intensities, dark counts are independent.
PortClicks interfere(double alpha_sq, double beta_sq, RelPhase phase, double e_d,
                     double p_d);

struct ScsObservation {
  double n_O = 0.0;    // clicks with both senders on vacuum
  double n_B = 0.0;    // clicks with both senders on the coherent state
  double n_Z = 0.0;    // clicks with exactly one coherent state (key rounds)
  double n_t = 0.0;    // n_O + n_B + n_Z
  double e_bit = 0.0;  // (n_B + n_O) / n_t
};

struct NppObservation {
  double n_00 = 0.0;    // decoy clicks, vacuum-vacuum
  double n_0nu = 0.0;   // decoy clicks, vacuum-nu
  double n_nu0 = 0.0;   // decoy clicks, nu-vacuum
  double n_s = 0.0;     // sifted signal-signal clicks
  double e_bit = 0.0;   // bit error rate of the sifted clicks
};

struct ScsPulseParams {
  double mu = 0.05;  // coherent-state intensity
  double p = 0.3;    // probability of choosing the coherent state
};

struct NppPulseParams {
  double mu = 0.01;  // signal intensity
  double nu = 0.01;  // decoy intensity
  double p = 0.5;    // signal-round probability
  double p0 = 0.5;   // vacuum probability within decoy rounds
};

/// Expected (real-valued) click counts over g.N rounds of the honest channel.
/// Throws std::domain_error when the channel is fully degenerate (n_t == 0).
ScsObservation scs_expected_counts(const GlobalParams& g, double mu, double p);

/// Same for the twin-field protocol; a click is an exclusive event on either
/// detector. Throws when n_s == 0.
NppObservation npp_expected_counts(const GlobalParams& g, double mu, double nu,
                                   double p, double p0);

/// Deterministic seed derivation for independent sampling shards.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t shard);

// Seeded per-round samplers drawing from the same per-round probabilities as
// the expected-count model. Counts are integers (stored in doubles); counts
// from shards with distinct derived seeds add up to one larger sample.
// rounds is capped at 1e8.
ScsObservation mc_sample_scs(const GlobalParams& g, const ScsPulseParams& sp,
                             std::uint64_t rounds, std::uint64_t seed);
NppObservation mc_sample_npp(const GlobalParams& g, const NppPulseParams& np,
                             std::uint64_t rounds, std::uint64_t seed);

}  // namespace qkd
