#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkd/optimizer.hpp"

namespace qkd {

/// Raised for malformed configuration; the message names the offending key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Everything a run needs. File values are overridden by CLI flags.
struct RunConfig {
  Protocol protocol = Protocol::kScs;
  PenaltyMode mode = PenaltyMode::kExact;
  bool asymptotic = false;         // evaluate in asymptotic mode
  bool include_asymptotic = true;  // sweep: add asymptotic rows
  std::string output = "results.csv";
  int jobs = 0;

  GlobalParams channel;
  std::vector<double> sweep_L;
  std::vector<double> sweep_N;

  ScsPulseParams scs;
  std::optional<double> scs_c0;
  std::optional<ScsSourceSpec> source;
  NppPulseParams npp;

  SearchSpace search;

  std::uint64_t mc_rounds = 1000000;
  std::uint64_t mc_seed = 7;
  int mc_seeds = 20;
};

/// Parses the flat INI-style config: [section] headers, key = value lines,
/// '#'/';' comments. Unknown sections or keys are rejected with the key name
/// in the error message.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, RunConfig base = {});

// Value-syntax helpers shared with the CLI: "a,b,c" lists, "start:stop:step"
// ranges, "lo:hi" intervals.
std::vector<double> parse_number_list(const std::string& text);
Interval parse_interval(const std::string& text);

}  // namespace qkd
