#include "qkd/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace qkd {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

EpsilonBudget make_budget(Protocol proto, const GlobalParams& g, const EvalOptions& opt) {
  if (opt.asymptotic) return EpsilonBudget::asymptotic_budget();
  return proto == Protocol::kScs ? scs_default_budget(g.eps_tot, g.N, opt.mode)
                                 : npp_default_budget(g.eps_tot, g.N, opt.mode);
}

KeyRateResult eval_scs_with_budget(const GlobalParams& g, double mu, double p,
                                   std::optional<double> c0, const EvalOptions& opt,
                                   const EpsilonBudget& budget) {
  const ScsObservation obs = scs_expected_counts(g, mu, p);
  double mu_a = mu, mu_b = mu;
  if (opt.source) {
    mu_a = effective_intensity(opt.source->a0, opt.source->a_v0);
    mu_b = effective_intensity(opt.source->b0, opt.source->b_v0);
  }
  const ScsCoefficients c = scs_coefficients(mu_a, mu_b, c0);
  ClampMask clamps = 0;
  const double n_ph = estimate_phase_errors(obs, g.N, p, c, budget.t0, &clamps);
  KeyRateResult r = scs_key_length(obs, n_ph, g, budget);
  r.clamps |= clamps;
  r.params = {{"mu", mu}, {"p", p}, {"c0", c.c0}};
  return r;
}

KeyRateResult eval_npp_with_budget(const GlobalParams& g, double mu, double nu,
                                   double p, double p0, const EvalOptions& opt,
                                   const EpsilonBudget& budget) {
  (void)opt;
  const NppObservation obs = npp_expected_counts(g, mu, nu, p, p0);
  ClampMask clamps = 0;
  const NppDecoyBounds q = npp_decoy_bounds(obs, g.N, p, p0, nu, budget.t0, &clamps);
  const double p_cor = phase_correct_bound(q.q01_lower, q.q10_lower, mu, p, &clamps);
  KeyRateResult r = npp_key_length(obs, p_cor, g, budget);
  r.clamps |= clamps;
  r.params = {{"mu", mu}, {"nu", nu}, {"p", p}, {"p0", p0}};
  r.terms["q01_lower"] = q.q01_lower;
  r.terms["q10_lower"] = q.q10_lower;
  return r;
}

// ---------------------------------------------------------------------------
// search machinery
// ---------------------------------------------------------------------------

struct ParamAxis {
  const char* name;
  double lo;
  double hi;
  bool log_scale;

  double map(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    if (lo == hi) return lo;
    if (log_scale) return lo * std::pow(hi / lo, u);
    return lo + (hi - lo) * u;
  }
  bool degenerate() const { return lo == hi; }
};

// Axes of the search: protocol parameters first, then (optionally) the
// epsilon-split weights, which only the refinement stage explores.
struct SearchProblem {
  Protocol proto;
  const GlobalParams* g;
  const EvalOptions* opt;
  std::vector<ParamAxis> axes;
  int n_split = 0;  // trailing split-weight axes
  bool has_c0 = false;
  EpsilonBudget fixed_budget;  // used when the split is not tuned
  double cached_ln_g = 0.0;    // reused across tuned-split evaluations

  EpsilonBudget budget_for(std::span<const double> u) const {
    if (n_split == 0) return fixed_budget;
    const std::size_t base = axes.size() - n_split;
    if (proto == Protocol::kScs) {
      std::array<double, 4> f{};
      for (int i = 0; i < 4; ++i) f[i] = axes[base + i].map(u[base + i]);
      return scs_budget_from_fractions(g->eps_tot, f, g->N, opt->mode, cached_ln_g);
    }
    std::array<double, 3> f{};
    for (int i = 0; i < 3; ++i) f[i] = axes[base + i].map(u[base + i]);
    return npp_budget_from_fractions(g->eps_tot, f, g->N, opt->mode, cached_ln_g);
  }

  KeyRateResult evaluate(std::span<const double> u) const {
    const EpsilonBudget b = budget_for(u);
    if (proto == Protocol::kScs) {
      const double mu = axes[0].map(u[0]);
      const double p = axes[1].map(u[1]);
      std::optional<double> c0;
      if (has_c0) c0 = axes[2].map(u[2]);
      return eval_scs_with_budget(*g, mu, p, c0, *opt, b);
    }
    const double mu = axes[0].map(u[0]);
    const double nu = axes[1].map(u[1]);
    const double p = axes[2].map(u[2]);
    const double p0 = axes[3].map(u[3]);
    return eval_npp_with_budget(*g, mu, nu, p, p0, *opt, b);
  }

  // search objective; a degenerate corner of the box scores like zero key
  // instead of aborting the whole cell
  double rate(std::span<const double> u) const {
    try {
      return evaluate(u).rate;
    } catch (const std::domain_error&) {
      return -1.0;
    }
  }
};

// Downhill simplex over the unit cube, minimizing f. Deterministic; spends
// at most max_evals objective calls. Returns the best vertex seen.
std::pair<std::vector<double>, double> nelder_mead(
    const std::function<double(std::span<const double>)>& f, std::vector<double> x0,
    const std::vector<double>& step, int max_evals) {
  const std::size_t n = x0.size();
  int evals = 0;
  const auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return f(x);
  };

  std::vector<std::vector<double>> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  for (std::size_t i = 0; i < n; ++i) xs[i + 1][i] += step[i];
  for (std::size_t i = 0; i <= n; ++i) fs[i] = eval(xs[i]);

  std::vector<std::size_t> order(n + 1);
  while (evals < max_evals) {
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    const std::size_t best = order[0], worst = order[n], second = order[n - 1];

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += xs[i][d];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    double spread = 0.0;
    for (std::size_t d = 0; d < n; ++d)
      spread = std::max(spread, std::abs(xs[worst][d] - xs[best][d]));
    if (spread < 1e-10) break;

    const auto blend = [&](double coef) {
      std::vector<double> x(n);
      for (std::size_t d = 0; d < n; ++d)
        x[d] = centroid[d] + coef * (xs[worst][d] - centroid[d]);
      return x;
    };

    const std::vector<double> refl = blend(-1.0);
    const double f_refl = eval(refl);
    if (f_refl < fs[best]) {
      const std::vector<double> expa = blend(-2.0);
      const double f_expa = eval(expa);
      if (f_expa < f_refl) {
        xs[worst] = expa;
        fs[worst] = f_expa;
      } else {
        xs[worst] = refl;
        fs[worst] = f_refl;
      }
      continue;
    }
    if (f_refl < fs[second]) {
      xs[worst] = refl;
      fs[worst] = f_refl;
      continue;
    }
    const std::vector<double> contr = blend(f_refl < fs[worst] ? -0.5 : 0.5);
    const double f_contr = eval(contr);
    if (f_contr < std::min(f_refl, fs[worst])) {
      xs[worst] = contr;
      fs[worst] = f_contr;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t d = 0; d < n; ++d)
        xs[i][d] = xs[best][d] + 0.5 * (xs[i][d] - xs[best][d]);
      fs[i] = eval(xs[i]);
      if (evals >= max_evals) break;
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i)
    if (fs[i] < fs[best]) best = i;
  return {xs[best], fs[best]};
}

}  // namespace

void SearchSpace::validate(Protocol proto) const {
  require(grid_points >= 1, "SearchSpace: grid_points must be >= 1");
  require(refine_evals >= 0, "SearchSpace: refine_evals must be >= 0");
  require(mu.valid() && mu.lo > 0.0, "SearchSpace: invalid mu interval");
  require(p.valid() && p.lo > 0.0 && p.hi < 1.0, "SearchSpace: invalid p interval");
  if (proto == Protocol::kNpp) {
    require(nu.valid() && nu.lo > 0.0, "SearchSpace: invalid nu interval");
    require(p0.valid() && p0.lo > 0.0 && p0.hi < 1.0, "SearchSpace: invalid p0 interval");
  }
  if (c0) require(c0->valid() && c0->lo > 0.0, "SearchSpace: invalid c0 interval");
}

KeyRateResult evaluate_scs(const GlobalParams& g, double mu, double p,
                           std::optional<double> c0, const EvalOptions& opt) {
  g.validate();
  return eval_scs_with_budget(g, mu, p, c0, opt, make_budget(Protocol::kScs, g, opt));
}

KeyRateResult evaluate_npp(const GlobalParams& g, double mu, double nu, double p,
                           double p0, const EvalOptions& opt) {
  g.validate();
  return eval_npp_with_budget(g, mu, nu, p, p0, opt,
                              make_budget(Protocol::kNpp, g, opt));
}

KeyRateResult optimize(Protocol proto, const GlobalParams& g, const SearchSpace& space,
                       const EvalOptions& opt) {
  g.validate();
  space.validate(proto);

  SearchProblem prob;
  prob.proto = proto;
  prob.g = &g;
  prob.opt = &opt;
  if (proto == Protocol::kScs) {
    prob.axes = {{"mu", space.mu.lo, space.mu.hi, true},
                 {"p", space.p.lo, space.p.hi, false}};
    if (space.c0) {
      prob.axes.push_back({"c0", space.c0->lo, space.c0->hi, false});
      prob.has_c0 = true;
    }
  } else {
    prob.axes = {{"mu", space.mu.lo, space.mu.hi, true},
                 {"nu", space.nu.lo, space.nu.hi, true},
                 {"p", space.p.lo, space.p.hi, false},
                 {"p0", space.p0.lo, space.p0.hi, false}};
  }
  const std::size_t n_proto = prob.axes.size();
  const bool tune_split = space.tune_budget_split && !opt.asymptotic;
  if (tune_split) {
    prob.n_split = proto == Protocol::kScs ? 4 : 3;
    for (int i = 0; i < prob.n_split; ++i)
      prob.axes.push_back({"split", 0.05, 1.0, false});
    const double x =
        (proto == Protocol::kScs ? DimensionSpec::scs() : DimensionSpec::npp()).x();
    prob.cached_ln_g = opt.mode == PenaltyMode::kExact ? ln_g(g.N, x)
                                                       : ln_g_bound(g.N, x);
  }
  if (prob.n_split == 0) prob.fixed_budget = make_budget(proto, g, opt);

  // coarse scan over the protocol axes; split weights stay at the default
  const int pts = space.grid_points;
  std::vector<double> u(prob.axes.size(), 0.5);
  if (tune_split) {
    // default equal split: map 0.5 -> the same weight on every axis
    for (std::size_t d = n_proto; d < prob.axes.size(); ++d) u[d] = 0.5;
  }
  std::vector<double> best_u = u;
  double best_rate = -1.0;
  std::vector<int> idx(n_proto, 0);
  for (;;) {
    for (std::size_t d = 0; d < n_proto; ++d) {
      const int n_d = prob.axes[d].degenerate() ? 1 : pts;
      u[d] = n_d == 1 ? 0.0 : static_cast<double>(idx[d]) / (n_d - 1);
    }
    const double rate = prob.rate(u);
    if (rate > best_rate) {
      best_rate = rate;
      best_u = u;
    }
    // odometer increment
    std::size_t d = 0;
    for (; d < n_proto; ++d) {
      const int n_d = prob.axes[d].degenerate() ? 1 : pts;
      if (++idx[d] < n_d) break;
      idx[d] = 0;
    }
    if (d == n_proto) break;
  }

  // simplex refinement from the best grid cell
  std::vector<double> step(prob.axes.size(), 0.0);
  bool any_free = false;
  for (std::size_t d = 0; d < prob.axes.size(); ++d) {
    if (prob.axes[d].degenerate()) continue;
    any_free = true;
    step[d] = d < n_proto ? (pts > 1 ? 1.0 / (pts - 1) : 0.25) : 0.25;
    step[d] *= best_u[d] + step[d] > 1.0 ? -1.0 : 1.0;
  }
  if (any_free && space.refine_evals > 0) {
    const auto objective = [&](std::span<const double> x) { return -prob.rate(x); };
    auto [u_ref, f_ref] = nelder_mead(objective, best_u, step, space.refine_evals);
    if (-f_ref > best_rate) {
      best_rate = -f_ref;
      best_u = u_ref;
    }
  }

  return prob.evaluate(best_u);
}

std::vector<SweepRow> sweep(Protocol proto, const GlobalParams& base,
                            std::span<const double> distances,
                            std::span<const double> n_values,
                            const SearchSpace& space, const EvalOptions& opt,
                            bool include_asymptotic, int jobs) {
  base.validate();
  struct Cell {
    double L;
    double N;
    bool asym;
  };
  std::vector<Cell> cells;
  double n_asym = base.N;
  for (double n : n_values) n_asym = std::max(n_asym, n);
  for (double L : distances) {
    for (double n : n_values) cells.push_back({L, n, false});
    if (include_asymptotic) cells.push_back({L, n_asym, true});
  }

  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        GlobalParams g = base;
        g.L = cells[i].L;
        g.N = cells[i].N;
        EvalOptions cell_opt = opt;
        cell_opt.asymptotic = opt.asymptotic || cells[i].asym;
        rows[i] = {cells[i].L, cells[i].N, cell_opt.asymptotic,
                   optimize(proto, g, space, cell_opt)};
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  unsigned n_threads = jobs > 0 ? static_cast<unsigned>(jobs)
                                : std::thread::hardware_concurrency();
  n_threads = std::max(1u, std::min<unsigned>(n_threads, cells.size() ? cells.size() : 1));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

}  // namespace qkd
