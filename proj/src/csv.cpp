#include "qkd/csv.hpp"

#include <cmath>
#include <cstdio>

namespace qkd {

namespace {

double term_or(const KeyRateResult& r, const char* key, double fallback = 0.0) {
  const auto it = r.terms.find(key);
  return it != r.terms.end() ? it->second : fallback;
}

double param_or_nan(const KeyRateResult& r, const char* key) {
  const auto it = r.params.find(key);
  return it != r.params.end() ? it->second : std::nan("");
}

// NaN marks a not-applicable cell and renders empty.
std::string cell(double v) { return std::isnan(v) ? std::string() : format_number(v); }

std::string join_clamps(const KeyRateResult& r) {
  std::string out;
  for (const std::string& name : r.clamps_hit()) {
    if (!out.empty()) out += ';';
    out += name;
  }
  return out;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string csv_header() {
  return "protocol,L_km,N,mode,mu,nu,p,p0,c0,n_O/n_00,n_B/n_0nu,n_Z/n_nu0,n_s,"
         "e_bit,n_ph_or_ncor,l_bits,rate_per_pulse,eps_bar,eps_cor,eps_prime,"
         "ln_inv_eps0,ln_g,clamps";
}

std::string csv_row(Protocol proto, const SweepRow& row) {
  const KeyRateResult& r = row.result;
  const bool scs = proto == Protocol::kScs;
  const double nan = std::nan("");

  std::string out;
  out += scs ? "scs" : "npp";
  out += ',';
  out += format_number(row.L);
  out += ',';
  out += row.asymptotic ? "inf" : format_number(row.N);
  out += ',';
  if (row.asymptotic)
    out += "asymptotic";
  else
    out += r.budget.penalty_mode == PenaltyMode::kExact ? "exact" : "bound";
  out += ',';
  out += cell(param_or_nan(r, "mu"));
  out += ',';
  out += cell(param_or_nan(r, "nu"));
  out += ',';
  out += cell(param_or_nan(r, "p"));
  out += ',';
  out += cell(param_or_nan(r, "p0"));
  out += ',';
  out += cell(param_or_nan(r, "c0"));
  out += ',';
  out += cell(term_or(r, scs ? "n_O" : "n_00", nan));
  out += ',';
  out += cell(term_or(r, scs ? "n_B" : "n_0nu", nan));
  out += ',';
  out += cell(term_or(r, scs ? "n_Z" : "n_nu0", nan));
  out += ',';
  out += scs ? std::string() : cell(term_or(r, "n_s", nan));
  out += ',';
  out += cell(term_or(r, "e_bit", nan));
  out += ',';
  out += cell(term_or(r, scs ? "n_ph_bar" : "n_cor", nan));
  out += ',';
  out += format_number(r.l);
  out += ',';
  out += format_number(r.rate);
  out += ',';
  if (row.asymptotic) {
    out += ",,,,";  // eps_bar, eps_cor, eps_prime, ln_inv_eps0 empty
    out += ',';     // ln_g empty
  } else {
    out += format_number(r.budget.t_bar.epsilon());
    out += ',';
    out += format_number(r.budget.t_cor.epsilon());
    out += ',';
    out += r.budget.uses_prime ? format_number(r.budget.t_prime.epsilon()) : std::string();
    out += ',';
    out += format_number(r.budget.t0.t);
    out += ',';
    out += format_number(r.budget.ln_g);
  }
  out += ',';
  out += join_clamps(r);
  return out;
}

std::string render_csv(Protocol proto, const std::vector<SweepRow>& rows) {
  std::string out = csv_header();
  out += '\n';
  for (const SweepRow& row : rows) {
    out += csv_row(proto, row);
    out += '\n';
  }
  return out;
}

}  // namespace qkd
