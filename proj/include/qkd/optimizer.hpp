#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qkd/npp.hpp"
#include "qkd/scs.hpp"

namespace qkd {

enum class Protocol { kScs, kNpp };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool valid() const { return lo <= hi; }
};

/// Parameter box searched per (L, N) cell. Intensities are scanned on a
/// log-spaced grid, probabilities on a linear one.
struct SearchSpace {
  Interval mu{1e-4, 1.0};
  Interval nu{1e-4, 1.0};      // NPP only
  Interval p{1e-3, 0.999};
  Interval p0{1e-3, 0.999};    // NPP only
  std::optional<Interval> c0;  // SCS only; enables the c0 line search
  int grid_points = 16;        // coarse points per dimension
  int refine_evals = 200;      // budget for the simplex refinement
  bool tune_budget_split = false;  // add epsilon split fractions to the search

  void validate(Protocol proto) const;
};

struct EvalOptions {
  PenaltyMode mode = PenaltyMode::kExact;
  bool asymptotic = false;  // expected counts, no corrections, no constants
  std::optional<ScsSourceSpec> source;  // SCS imperfect-source parameters
};

/// Single-point evaluations over the honest expected-count channel.
KeyRateResult evaluate_scs(const GlobalParams& g, double mu, double p,
                           std::optional<double> c0 = std::nullopt,
                           const EvalOptions& opt = {});
KeyRateResult evaluate_npp(const GlobalParams& g, double mu, double nu, double p,
                           double p0, const EvalOptions& opt = {});

/// Coarse grid scan followed by derivative-free simplex refinement from the
/// best cell. Deterministic for a fixed configuration. A space where every
/// point yields l = 0 returns a flagged zero-key result, not an error.
KeyRateResult optimize(Protocol proto, const GlobalParams& g, const SearchSpace& space,
                       const EvalOptions& opt = {});

struct SweepRow {
  double L = 0.0;
  double N = 0.0;
  bool asymptotic = false;
  KeyRateResult result;
};

/// One optimized result per (L, N) pair, plus an asymptotic row per L when
/// requested. Rows are independent and evaluated concurrently on `jobs`
/// threads (0 = hardware concurrency); the output order is deterministic:
/// for each L, finite rows in the given N order, then the asymptotic row.
std::vector<SweepRow> sweep(Protocol proto, const GlobalParams& base,
                            std::span<const double> distances,
                            std::span<const double> n_values,
                            const SearchSpace& space, const EvalOptions& opt,
                            bool include_asymptotic, int jobs = 0);

}  // namespace qkd
