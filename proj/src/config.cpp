#include "qkd/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qkd {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_number(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size())
    throw ConfigError("config: key '" + key + "' has a malformed number: '" + t + "'");
  return v;
}

bool parse_bool(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError("config: key '" + key + "' expects a boolean, got '" + t + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& token : split(text, ',')) {
    const std::vector<std::string> parts = split(token, ':');
    if (parts.size() == 1) {
      out.push_back(parse_number(parts[0], "list"));
    } else if (parts.size() == 3) {
      const double start = parse_number(parts[0], "range start");
      const double stop = parse_number(parts[1], "range stop");
      const double step = parse_number(parts[2], "range step");
      if (!(step > 0.0)) throw ConfigError("config: range step must be > 0");
      // inclusive range with a half-step guard against roundoff at the stop
      for (double v = start; v <= stop + step * 0.5; v += step) out.push_back(v);
    } else {
      throw ConfigError("config: expected 'number' or 'start:stop:step', got '" +
                        token + "'");
    }
  }
  return out;
}

Interval parse_interval(const std::string& text) {
  const std::vector<std::string> parts = split(text, ':');
  if (parts.size() != 2)
    throw ConfigError("config: expected an interval 'lo:hi', got '" + text + "'");
  Interval iv{parse_number(parts[0], "interval lo"), parse_number(parts[1], "interval hi")};
  if (!iv.valid()) throw ConfigError("config: interval '" + text + "' has lo > hi");
  return iv;
}

RunConfig parse_config_text(const std::string& text, RunConfig cfg) {
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;

  // imperfect-source keys arrive piecemeal; assembled at the end
  std::optional<double> a0, a_v0, b0, b_v0;

  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "run" && section != "channel" && section != "sweep" &&
          section != "scs" && section != "npp" && section != "search" &&
          section != "mc")
        throw ConfigError("config: unknown section '" + section + "'");
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string qualified = section.empty() ? key : section + "." + key;

    if (section == "run") {
      if (key == "protocol") {
        if (value == "scs")
          cfg.protocol = Protocol::kScs;
        else if (value == "npp")
          cfg.protocol = Protocol::kNpp;
        else
          throw ConfigError("config: run.protocol must be 'scs' or 'npp', got '" +
                            value + "'");
      } else if (key == "mode") {
        if (value == "exact")
          cfg.mode = PenaltyMode::kExact;
        else if (value == "bound")
          cfg.mode = PenaltyMode::kSimplified;
        else
          throw ConfigError("config: run.mode must be 'exact' or 'bound', got '" +
                            value + "'");
      } else if (key == "asymptotic") {
        cfg.asymptotic = parse_bool(value, qualified);
      } else if (key == "include_asymptotic") {
        cfg.include_asymptotic = parse_bool(value, qualified);
      } else if (key == "output") {
        cfg.output = value;
      } else if (key == "jobs") {
        cfg.jobs = static_cast<int>(parse_number(value, qualified));
      } else {
        throw ConfigError("config: unknown key '" + qualified + "'");
      }
    } else if (section == "channel") {
      if (key == "p_d")
        cfg.channel.p_d = parse_number(value, qualified);
      else if (key == "e_d")
        cfg.channel.e_d = parse_number(value, qualified);
      else if (key == "eta_d")
        cfg.channel.eta_d = parse_number(value, qualified);
      else if (key == "f")
        cfg.channel.f = parse_number(value, qualified);
      else if (key == "alpha_f")
        cfg.channel.alpha_f = parse_number(value, qualified);
      else if (key == "eps_tot")
        cfg.channel.eps_tot = LogEps::from_epsilon(parse_number(value, qualified));
      else if (key == "N")
        cfg.channel.N = parse_number(value, qualified);
      else if (key == "L")
        cfg.channel.L = parse_number(value, qualified);
      else
        throw ConfigError("config: unknown key '" + qualified + "'");
    } else if (section == "sweep") {
      if (key == "L")
        cfg.sweep_L = parse_number_list(value);
      else if (key == "N")
        cfg.sweep_N = parse_number_list(value);
      else
        throw ConfigError("config: unknown key '" + qualified + "'");
    } else if (section == "scs") {
      if (key == "mu")
        cfg.scs.mu = parse_number(value, qualified);
      else if (key == "p")
        cfg.scs.p = parse_number(value, qualified);
      else if (key == "c0")
        cfg.scs_c0 = parse_number(value, qualified);
      else if (key == "a0")
        a0 = parse_number(value, qualified);
      else if (key == "a_v0")
        a_v0 = parse_number(value, qualified);
      else if (key == "b0")
        b0 = parse_number(value, qualified);
      else if (key == "b_v0")
        b_v0 = parse_number(value, qualified);
      else
        throw ConfigError("config: unknown key '" + qualified + "'");
    } else if (section == "npp") {
      if (key == "mu")
        cfg.npp.mu = parse_number(value, qualified);
      else if (key == "nu")
        cfg.npp.nu = parse_number(value, qualified);
      else if (key == "p")
        cfg.npp.p = parse_number(value, qualified);
      else if (key == "p0")
        cfg.npp.p0 = parse_number(value, qualified);
      else
        throw ConfigError("config: unknown key '" + qualified + "'");
    } else if (section == "search") {
      if (key == "mu")
        cfg.search.mu = parse_interval(value);
      else if (key == "nu")
        cfg.search.nu = parse_interval(value);
      else if (key == "p")
        cfg.search.p = parse_interval(value);
      else if (key == "p0")
        cfg.search.p0 = parse_interval(value);
      else if (key == "c0")
        cfg.search.c0 = parse_interval(value);
      else if (key == "grid_points")
        cfg.search.grid_points = static_cast<int>(parse_number(value, qualified));
      else if (key == "refine_evals")
        cfg.search.refine_evals = static_cast<int>(parse_number(value, qualified));
      else if (key == "tune_budget_split")
        cfg.search.tune_budget_split = parse_bool(value, qualified);
      else
        throw ConfigError("config: unknown key '" + qualified + "'");
    } else if (section == "mc") {
      if (key == "rounds")
        cfg.mc_rounds = static_cast<std::uint64_t>(parse_number(value, qualified));
      else if (key == "seed")
        cfg.mc_seed = static_cast<std::uint64_t>(parse_number(value, qualified));
      else if (key == "seeds")
        cfg.mc_seeds = static_cast<int>(parse_number(value, qualified));
      else
        throw ConfigError("config: unknown key '" + qualified + "'");
    } else {
      throw ConfigError("config: key '" + key + "' appears before any section");
    }
  }

  const int source_keys = a0.has_value() + a_v0.has_value() + b0.has_value() +
                          b_v0.has_value();
  if (source_keys == 4) {
    cfg.source = ScsSourceSpec{*a0, *a_v0, *b0, *b_v0};
  } else if (source_keys != 0) {
    throw ConfigError(
        "config: imperfect source needs all of scs.a0, scs.a_v0, scs.b0, scs.b_v0");
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace qkd
