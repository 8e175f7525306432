#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qlm/errors.hpp"

namespace qlm {

/// Fully resolved run description: catalog names and parameters, resolution,
/// task selection, and output routing.  Populated from a TOML-subset config
/// file and/or command-line flags; flags override the file.
struct RunConfig {
  std::string task;
  std::string spacetime = "minkowski-spherical";
  std::map<std::string, double> spacetime_params;
  std::string surface = "sphere";
  std::map<std::string, double> surface_params;
  int L = 32;
  int n_theta = 0;  // 0 -> derived from L
  int n_phi = 0;
  std::string format = "json";
  std::string out;    // empty -> stdout
  std::string suite = "all";
  std::string dump;   // verify: optional density dump (CSV)
  std::vector<double> radii;  // sweep radii; defaults filled by the task
  std::map<std::string, double> tolerances;

  /// Band limit actually used: the largest of L and what Ntheta/Nphi demand
  /// (grids are always the Gauss-Legendre product grid of a band limit).
  int effective_band_limit() const {
    int Leff = L;
    if (n_theta > 0) Leff = std::max(Leff, n_theta - 1);
    if (n_phi > 0) Leff = std::max(Leff, (n_phi - 1) / 2);
    return Leff;
  }

  double tolerance(const std::string& key, double fallback) const {
    auto it = tolerances.find(key);
    return it == tolerances.end() ? fallback : it->second;
  }

  void validate() const {
    if (L < 8) throw ConfigError("cli", "band limit L must be >= 8");
    if (n_theta < 0 || n_phi < 0)
      throw ConfigError("cli", "grid sizes must be nonnegative");
    if (format != "json" && format != "csv")
      throw ConfigError("cli", "format must be json or csv, got: " + format);
    for (const auto& [k, v] : tolerances)
      if (v <= 0.0) throw ConfigError("cli", "tolerance " + k + " must be positive");
  }
};

namespace detail {

inline std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline double parse_number(const std::string& raw, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(raw.c_str(), &end);
  if (end == raw.c_str() || *end != '\0')
    throw ConfigError("cli", where + ": expected a number, got: " + raw);
  return v;
}

/// Accepts "1.5" or "1,2,4" (used by sweep radii on the command line).
inline std::vector<double> parse_number_list(const std::string& raw,
                                             const std::string& where) {
  std::vector<double> vals;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(parse_number(strip(item), where));
  if (vals.empty()) throw ConfigError("cli", where + ": empty value");
  return vals;
}

inline void config_assign(RunConfig& cfg, const std::string& section,
                          const std::string& key, const std::string& value) {
  auto unquote = [&](const std::string& v) -> std::string {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
      return v.substr(1, v.size() - 2);
    return v;
  };
  const std::string where = section.empty() ? key : section + "." + key;
  if (section.empty()) {
    if (key == "task") cfg.task = unquote(value);
    else throw ConfigError("cli", "unknown top-level key: " + key);
    return;
  }
  if (section == "spacetime") {
    if (key == "name") cfg.spacetime = unquote(value);
    else cfg.spacetime_params[key] = parse_number(value, where);
    return;
  }
  if (section == "surface") {
    if (key == "name") cfg.surface = unquote(value);
    else if (key == "L") cfg.L = static_cast<int>(parse_number(value, where));
    else if (key == "Ntheta") cfg.n_theta = static_cast<int>(parse_number(value, where));
    else if (key == "Nphi") cfg.n_phi = static_cast<int>(parse_number(value, where));
    else cfg.surface_params[key] = parse_number(value, where);
    return;
  }
  if (section == "output") {
    if (key == "format") cfg.format = unquote(value);
    else if (key == "path") cfg.out = unquote(value);
    else if (key == "dump") cfg.dump = unquote(value);
    else throw ConfigError("cli", "unknown output key: " + key);
    return;
  }
  if (section == "sweep") {
    if (key == "radii") {
      std::string v = strip(value);
      if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        throw ConfigError("cli", "sweep.radii must be an array [r1, r2, ...]");
      cfg.radii = parse_number_list(v.substr(1, v.size() - 2), where);
    } else {
      throw ConfigError("cli", "unknown sweep key: " + key);
    }
    return;
  }
  if (section == "verify") {
    if (key == "suite") cfg.suite = unquote(value);
    else throw ConfigError("cli", "unknown verify key: " + key);
    return;
  }
  if (section == "tolerances") {
    cfg.tolerances[key] = parse_number(value, where);
    return;
  }
  throw ConfigError("cli", "unknown config section: [" + section + "]");
}

}  // namespace detail

/// TOML subset: [section] headers, key = value lines, # comments, quoted
/// strings, numbers, and flat numeric arrays (sweep.radii only).
inline RunConfig parse_config_stream(std::istream& in) {
  RunConfig cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::strip(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("cli", "line " + std::to_string(lineno) + ": bad section header");
      section = detail::strip(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("cli", "line " + std::to_string(lineno) + ": expected key = value");
    detail::config_assign(cfg, section, detail::strip(line.substr(0, eq)),
                          detail::strip(line.substr(eq + 1)));
  }
  return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cli", "cannot open config file: " + path);
  return parse_config_stream(in);
}

/// Applies command-line flags on top of cfg.  args excludes the program name
/// and the subcommand; --config must already have been consumed by the caller.
inline void apply_flags(RunConfig& cfg, const std::vector<std::string>& args) {
  auto need_value = [&](size_t i, const std::string& flag) -> const std::string& {
    if (i + 1 >= args.size())
      throw ConfigError("cli", flag + " requires a value");
    return args[i + 1];
  };
  for (size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--spacetime") cfg.spacetime = need_value(i++, a);
    else if (a == "--surface") cfg.surface = need_value(i++, a);
    else if (a == "--M") cfg.spacetime_params["M"] = detail::parse_number(need_value(i++, a), a);
    else if (a == "--r") {
      const std::vector<double> vals = detail::parse_number_list(need_value(i++, a), a);
      cfg.surface_params["r"] = vals.front();
      cfg.radii = vals;
    } else if (a == "--eps") {
      const double v = detail::parse_number(need_value(i++, a), a);
      cfg.surface_params["eps"] = v;
      cfg.spacetime_params["eps"] = v;
    } else if (a == "--v") cfg.surface_params["v"] = detail::parse_number(need_value(i++, a), a);
    else if (a == "--L") cfg.L = static_cast<int>(detail::parse_number(need_value(i++, a), a));
    else if (a == "--Ntheta") cfg.n_theta = static_cast<int>(detail::parse_number(need_value(i++, a), a));
    else if (a == "--Nphi") cfg.n_phi = static_cast<int>(detail::parse_number(need_value(i++, a), a));
    else if (a == "--format") cfg.format = need_value(i++, a);
    else if (a == "--out") cfg.out = need_value(i++, a);
    else if (a == "--suite") cfg.suite = need_value(i++, a);
    else if (a == "--dump") cfg.dump = need_value(i++, a);
    else if (a == "--tol") {
      const std::string& kv = need_value(i++, a);
      const size_t eq = kv.find('=');
      if (eq == std::string::npos)
        throw ConfigError("cli", "--tol expects key=value");
      cfg.tolerances[kv.substr(0, eq)] =
          detail::parse_number(kv.substr(eq + 1), "--tol " + kv.substr(0, eq));
    } else {
      throw ConfigError("cli", "unknown flag: " + a);
    }
  }
}

}  // namespace qlm
