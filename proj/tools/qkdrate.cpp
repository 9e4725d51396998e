// qkdrate -- finite-key rate calculator for the SCS and NPP twin-field
// protocols.
//
// Subcommands:
//   scs sweep | scs eval | npp sweep | npp eval | validate mc | definetti
//
// Exit codes: 0 success, 1 validation failure, 2 configuration error,
// 3 zero key everywhere.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qkd/config.hpp"
#include "qkd/csv.hpp"
#include "qkd/optimizer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitZeroKey = 3;

struct CliOverrides {
  std::string config_path;
  std::string preset;
  std::optional<double> p_d, e_d, eta_d, f, alpha_f, eps_tot, N, L;
  std::optional<std::string> sweep_L, sweep_N;
  std::optional<double> mu, nu, p, p0, c0;
  std::optional<std::string> mode;
  bool asymptotic = false;
  bool asymptotic_rows_on = false;
  bool asymptotic_rows_off = false;
  std::optional<std::string> output;
  std::optional<int> jobs;
  std::optional<int> grid_points, refine_evals;
  bool tune_budget_split = false;
  std::optional<std::string> search_mu, search_nu, search_p, search_p0, search_c0;
  std::optional<double> rounds;
  std::optional<std::uint64_t> seed;
  std::optional<int> seeds;
  std::optional<std::string> mc_protocol;
};

void add_common_flags(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config_path, "Config file (INI-style sections)");
  cmd->add_option("--preset", o.preset,
                  "Named hardware preset; 'table1' is the reference set and the default");
  cmd->add_option("--p-d", o.p_d, "Dark-count probability per pulse");
  cmd->add_option("--e-d", o.e_d, "Misalignment error rate");
  cmd->add_option("--eta-d", o.eta_d, "Detector efficiency");
  cmd->add_option("--f", o.f, "Error-correction efficiency");
  cmd->add_option("--alpha-f", o.alpha_f, "Fiber loss, dB/km");
  cmd->add_option("--eps-tot", o.eps_tot, "Total security parameter");
  cmd->add_option("--mode", o.mode, "de Finetti penalty: 'exact' or 'bound'");
  cmd->add_option("--out", o.output, "Output CSV path");
  cmd->add_option("--jobs", o.jobs, "Worker threads (0 = hardware)");
}

void add_point_flags(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--N", o.N, "Pulse-pair count");
  cmd->add_option("--L", o.L, "Distance, km");
}

qkd::RunConfig build_config(const CliOverrides& o, qkd::Protocol proto) {
  using qkd::ConfigError;
  qkd::RunConfig cfg;
  if (!o.preset.empty() && o.preset != "table1" && o.preset != "default")
    throw ConfigError("unknown preset '" + o.preset + "' (available: table1)");
  if (!o.config_path.empty()) cfg = qkd::parse_config_file(o.config_path);
  cfg.protocol = proto;

  if (o.p_d) cfg.channel.p_d = *o.p_d;
  if (o.e_d) cfg.channel.e_d = *o.e_d;
  if (o.eta_d) cfg.channel.eta_d = *o.eta_d;
  if (o.f) cfg.channel.f = *o.f;
  if (o.alpha_f) cfg.channel.alpha_f = *o.alpha_f;
  if (o.eps_tot) cfg.channel.eps_tot = qkd::LogEps::from_epsilon(*o.eps_tot);
  if (o.N) cfg.channel.N = *o.N;
  if (o.L) cfg.channel.L = *o.L;

  if (o.sweep_L) cfg.sweep_L = qkd::parse_number_list(*o.sweep_L);
  if (o.sweep_N) cfg.sweep_N = qkd::parse_number_list(*o.sweep_N);

  if (o.mu) (proto == qkd::Protocol::kScs ? cfg.scs.mu : cfg.npp.mu) = *o.mu;
  if (o.p) (proto == qkd::Protocol::kScs ? cfg.scs.p : cfg.npp.p) = *o.p;
  if (o.nu) cfg.npp.nu = *o.nu;
  if (o.p0) cfg.npp.p0 = *o.p0;
  if (o.c0) cfg.scs_c0 = *o.c0;

  if (o.mode) {
    if (*o.mode == "exact")
      cfg.mode = qkd::PenaltyMode::kExact;
    else if (*o.mode == "bound")
      cfg.mode = qkd::PenaltyMode::kSimplified;
    else
      throw ConfigError("--mode must be 'exact' or 'bound', got '" + *o.mode + "'");
  }
  if (o.asymptotic) cfg.asymptotic = true;
  if (o.asymptotic_rows_on) cfg.include_asymptotic = true;
  if (o.asymptotic_rows_off) cfg.include_asymptotic = false;
  if (o.output) cfg.output = *o.output;
  if (o.jobs) cfg.jobs = *o.jobs;
  if (o.grid_points) cfg.search.grid_points = *o.grid_points;
  if (o.refine_evals) cfg.search.refine_evals = *o.refine_evals;
  if (o.tune_budget_split) cfg.search.tune_budget_split = true;
  if (o.search_mu) cfg.search.mu = qkd::parse_interval(*o.search_mu);
  if (o.search_nu) cfg.search.nu = qkd::parse_interval(*o.search_nu);
  if (o.search_p) cfg.search.p = qkd::parse_interval(*o.search_p);
  if (o.search_p0) cfg.search.p0 = qkd::parse_interval(*o.search_p0);
  if (o.search_c0) cfg.search.c0 = qkd::parse_interval(*o.search_c0);
  if (o.rounds) cfg.mc_rounds = static_cast<std::uint64_t>(*o.rounds);
  if (o.seed) cfg.mc_seed = *o.seed;
  if (o.seeds) cfg.mc_seeds = *o.seeds;
  return cfg;
}

// The only environment override: the directory written outputs land in.
std::filesystem::path resolve_output(const std::string& path) {
  std::filesystem::path p(path);
  const char* dir = std::getenv("QKDRATE_OUTDIR");
  if (dir && *dir && p.is_relative()) return std::filesystem::path(dir) / p;
  return p;
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path full = resolve_output(path);
  std::ofstream out(full, std::ios::binary);
  if (!out) throw qkd::ConfigError("cannot open output file '" + full.string() + "'");
  out << content;
}

qkd::EvalOptions eval_options(const qkd::RunConfig& cfg) {
  qkd::EvalOptions opt;
  opt.mode = cfg.mode;
  opt.asymptotic = cfg.asymptotic;
  opt.source = cfg.source;
  return opt;
}

void print_result_summary(const qkd::RunConfig& cfg, const qkd::KeyRateResult& r) {
  std::cout << "L = " << cfg.channel.L << " km, N = " << qkd::format_number(cfg.channel.N)
            << (cfg.asymptotic ? " (asymptotic)" : "") << "\n";
  std::cout << "  params:";
  for (const auto& [k, v] : r.params) std::cout << ' ' << k << '=' << qkd::format_number(v);
  std::cout << "\n  key length l = " << qkd::format_number(r.l)
            << " bits, rate = " << qkd::format_number(r.rate) << " per pulse\n";
  for (const auto& [k, v] : r.terms)
    std::cout << "  " << k << " = " << qkd::format_number(v) << "\n";
  if (!cfg.asymptotic) {
    std::cout << "  eps budget: eps_bar = " << qkd::format_number(r.budget.t_bar.epsilon())
              << ", eps_cor = " << qkd::format_number(r.budget.t_cor.epsilon());
    if (r.budget.uses_prime)
      std::cout << ", eps' = " << qkd::format_number(r.budget.t_prime.epsilon());
    std::cout << ", ln(1/eps0) = " << qkd::format_number(r.budget.t0.t)
              << ", ln g = " << qkd::format_number(r.budget.ln_g)
              << " (k = " << r.budget.k_uses << ")\n";
  }
  if (r.clamps) {
    std::cout << "  clamps:";
    for (const auto& name : r.clamps_hit()) std::cout << ' ' << name;
    std::cout << "\n";
  }
}

int run_eval(const CliOverrides& o, qkd::Protocol proto) {
  const qkd::RunConfig cfg = build_config(o, proto);
  qkd::KeyRateResult r;
  if (proto == qkd::Protocol::kScs)
    r = qkd::evaluate_scs(cfg.channel, cfg.scs.mu, cfg.scs.p, cfg.scs_c0,
                          eval_options(cfg));
  else
    r = qkd::evaluate_npp(cfg.channel, cfg.npp.mu, cfg.npp.nu, cfg.npp.p, cfg.npp.p0,
                          eval_options(cfg));
  print_result_summary(cfg, r);
  const qkd::SweepRow row{cfg.channel.L, cfg.channel.N, cfg.asymptotic, r};
  write_file(cfg.output, qkd::render_csv(proto, {row}));
  std::cout << "wrote " << resolve_output(cfg.output).string() << "\n";
  return r.zero_key() ? kExitZeroKey : kExitOk;
}

int run_sweep(const CliOverrides& o, qkd::Protocol proto) {
  qkd::RunConfig cfg = build_config(o, proto);
  if (cfg.sweep_L.empty()) cfg.sweep_L = {cfg.channel.L};
  if (cfg.sweep_N.empty()) cfg.sweep_N = {cfg.channel.N};
  const std::vector<qkd::SweepRow> rows =
      qkd::sweep(proto, cfg.channel, cfg.sweep_L, cfg.sweep_N, cfg.search,
                 eval_options(cfg), cfg.include_asymptotic, cfg.jobs);
  write_file(cfg.output, qkd::render_csv(proto, rows));

  bool any_key = false;
  double best_rate = 0.0, best_L = 0.0;
  for (const auto& row : rows) {
    if (row.asymptotic) continue;
    if (!row.result.zero_key()) any_key = true;
    if (row.result.rate > best_rate) {
      best_rate = row.result.rate;
      best_L = row.L;
    }
  }
  std::cout << rows.size() << " rows written to " << resolve_output(cfg.output).string()
            << "\n";
  if (any_key)
    std::cout << "best finite rate " << qkd::format_number(best_rate) << " at L = "
              << best_L << " km\n";
  else
    std::cout << "no positive key anywhere in the sweep\n";
  return any_key ? kExitOk : kExitZeroKey;
}

int run_validate_mc(const CliOverrides& o) {
  std::string proto_name = o.mc_protocol.value_or("scs");
  if (proto_name != "scs" && proto_name != "npp")
    throw qkd::ConfigError("--protocol must be 'scs' or 'npp', got '" + proto_name + "'");
  const qkd::Protocol proto =
      proto_name == "scs" ? qkd::Protocol::kScs : qkd::Protocol::kNpp;
  qkd::RunConfig cfg = build_config(o, proto);

  qkd::GlobalParams g = cfg.channel;
  g.N = static_cast<double>(cfg.mc_rounds);

  struct ClassStat {
    std::string name;
    double expected;
  };
  std::vector<ClassStat> classes;
  if (proto == qkd::Protocol::kScs) {
    const qkd::ScsObservation e = qkd::scs_expected_counts(g, cfg.scs.mu, cfg.scs.p);
    classes = {{"n_O", e.n_O}, {"n_Z", e.n_Z}, {"n_B", e.n_B}};
  } else {
    const qkd::NppObservation e =
        qkd::npp_expected_counts(g, cfg.npp.mu, cfg.npp.nu, cfg.npp.p, cfg.npp.p0);
    classes = {{"n_00", e.n_00}, {"n_0nu", e.n_0nu}, {"n_nu0", e.n_nu0}, {"n_s", e.n_s}};
  }

  bool pass = true;
  // 4-sigma gate on the per-sample z and on the mean across seeds
  const double mean_limit = 4.0 / std::sqrt(static_cast<double>(cfg.mc_seeds));
  std::vector<double> mean_z(classes.size(), 0.0);
  double worst_z = 0.0;
  for (int s = 0; s < cfg.mc_seeds; ++s) {
    const std::uint64_t seed = qkd::derive_seed(cfg.mc_seed, static_cast<std::uint64_t>(s));
    std::vector<double> counts;
    if (proto == qkd::Protocol::kScs) {
      const qkd::ScsObservation m = qkd::mc_sample_scs(g, cfg.scs, cfg.mc_rounds, seed);
      counts = {m.n_O, m.n_Z, m.n_B};
    } else {
      const qkd::NppObservation m = qkd::mc_sample_npp(g, cfg.npp, cfg.mc_rounds, seed);
      counts = {m.n_00, m.n_0nu, m.n_nu0, m.n_s};
    }
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const double sigma = std::sqrt(std::max(classes[c].expected, 1e-300));
      const double z = (counts[c] - classes[c].expected) / sigma;
      mean_z[c] += z / cfg.mc_seeds;
      worst_z = std::max(worst_z, std::abs(z));
      if (std::abs(z) > 4.0) {
        pass = false;
        std::cout << "[FAIL] seed " << s << " class " << classes[c].name << ": z = " << z
                  << "\n";
      }
    }
  }
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const bool ok = std::abs(mean_z[c]) < mean_limit;
    if (!ok) pass = false;
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << classes[c].name
              << ": expected = " << qkd::format_number(classes[c].expected)
              << ", mean z = " << qkd::format_number(mean_z[c]) << " (limit "
              << qkd::format_number(mean_limit) << ")\n";
  }
  std::cout << (pass ? "[PASS]" : "[FAIL]") << " " << cfg.mc_seeds << " seeds x "
            << cfg.mc_rounds << " rounds, worst |z| = " << qkd::format_number(worst_z)
            << " (limit 4)\n";
  return pass ? kExitOk : kExitValidationFailed;
}

int run_definetti(double n, double x, int k_uses, double eps_target) {
  if (n < 1.0 || x < 2.0)
    throw qkd::ConfigError("definetti: need --N >= 1 and --x >= 2");
  const double exact = qkd::ln_g(n, x);
  const double bound = qkd::ln_g_bound(n, x);
  std::cout << "ln_g(N = " << qkd::format_number(n) << ", x = " << qkd::format_number(x)
            << ") = " << qkd::format_number(exact) << "\n";
  std::cout << "ln_g_bound = " << qkd::format_number(bound) << "\n";
  if (eps_target > 0.0) {
    const qkd::LogEps t0 = qkd::lift_budget(qkd::LogEps::from_epsilon(eps_target),
                                            k_uses, n, x, qkd::PenaltyMode::kExact);
    std::cout << "ln(1/eps0) for k = " << k_uses
              << ", eps_target = " << qkd::format_number(eps_target) << ": "
              << qkd::format_number(t0.t) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-key security bounds for SCS and NPP twin-field QKD"};
  app.require_subcommand(1);

  CliOverrides o;

  CLI::App* scs = app.add_subcommand("scs", "Side-channel-secure protocol");
  scs->require_subcommand(1);
  CLI::App* scs_sweep = scs->add_subcommand("sweep", "Optimize rate over an (L, N) grid");
  CLI::App* scs_eval = scs->add_subcommand("eval", "Evaluate fixed parameters");
  CLI::App* npp = app.add_subcommand("npp", "No-phase-postselection twin-field protocol");
  npp->require_subcommand(1);
  CLI::App* npp_sweep = npp->add_subcommand("sweep", "Optimize rate over an (L, N) grid");
  CLI::App* npp_eval = npp->add_subcommand("eval", "Evaluate fixed parameters");
  CLI::App* validate = app.add_subcommand("validate", "Consistency checks");
  validate->require_subcommand(1);
  CLI::App* validate_mc = validate->add_subcommand(
      "mc", "Monte-Carlo sampler vs expected counts (4-sigma audit)");
  CLI::App* definetti_cmd =
      app.add_subcommand("definetti", "Print the de Finetti penalty for (N, x)");

  for (CLI::App* cmd : {scs_sweep, scs_eval, npp_sweep, npp_eval, validate_mc})
    add_common_flags(cmd, o);

  for (CLI::App* cmd : {scs_sweep, npp_sweep}) {
    cmd->add_option("--L", o.sweep_L, "Distances: 'a,b,c' or 'start:stop:step'");
    cmd->add_option("--N", o.sweep_N, "Pulse counts: comma list");
    cmd->add_flag("--asymptotic-rows", o.asymptotic_rows_on,
                  "Emit an asymptotic row per distance (default on)");
    cmd->add_flag("--no-asymptotic-rows", o.asymptotic_rows_off,
                  "Finite rows only");
    cmd->add_option("--grid", o.grid_points, "Coarse grid points per dimension");
    cmd->add_option("--refine", o.refine_evals, "Simplex refinement evaluations");
    cmd->add_flag("--tune-budget-split", o.tune_budget_split,
                  "Let the refinement tune the epsilon allocation");
    cmd->add_option("--search-mu", o.search_mu, "mu interval 'lo:hi'");
    cmd->add_option("--search-p", o.search_p, "p interval 'lo:hi'");
  }
  scs_sweep->add_option("--search-c0", o.search_c0,
                        "c0 interval 'lo:hi' (enables the c0 search)");
  npp_sweep->add_option("--search-nu", o.search_nu, "nu interval 'lo:hi'");
  npp_sweep->add_option("--search-p0", o.search_p0, "p0 interval 'lo:hi'");

  for (CLI::App* cmd : {scs_sweep, scs_eval, npp_sweep, npp_eval})
    cmd->add_flag("--asymptotic", o.asymptotic, "Infinite-key mode");

  for (CLI::App* cmd : {scs_eval, npp_eval, validate_mc}) {
    add_point_flags(cmd, o);
    cmd->add_option("--mu", o.mu, "Signal intensity");
    cmd->add_option("--p", o.p, "Signal probability");
  }
  for (CLI::App* cmd : {npp_eval, validate_mc}) {
    cmd->add_option("--nu", o.nu, "Decoy intensity");
    cmd->add_option("--p0", o.p0, "Vacuum probability within decoy rounds");
  }
  scs_eval->add_option("--c0", o.c0, "Decomposition coefficient override");

  validate_mc->add_option("--protocol", o.mc_protocol, "'scs' or 'npp'");
  validate_mc->add_option("--rounds", o.rounds, "Rounds per sample (<= 1e8)");
  validate_mc->add_option("--seed", o.seed, "Base seed");
  validate_mc->add_option("--seeds", o.seeds, "Number of seeded samples");

  double dn = 1e12, dx = 64, deps = 0.0;
  int dk = 1;
  definetti_cmd->add_option("--N", dn, "Round count");
  definetti_cmd->add_option("--x", dx, "Squared total dimension");
  definetti_cmd->add_option("--k", dk, "Chernoff uses for the eps0 readout");
  definetti_cmd->add_option("--eps-target", deps,
                            "Also print ln(1/eps0) for this target budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (scs_sweep->parsed()) return run_sweep(o, qkd::Protocol::kScs);
    if (scs_eval->parsed()) return run_eval(o, qkd::Protocol::kScs);
    if (npp_sweep->parsed()) return run_sweep(o, qkd::Protocol::kNpp);
    if (npp_eval->parsed()) return run_eval(o, qkd::Protocol::kNpp);
    if (validate_mc->parsed()) return run_validate_mc(o);
    if (definetti_cmd->parsed()) return run_definetti(dn, dx, dk, deps);
  } catch (const qkd::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitOk;
}
