#pragma once

#include <cctype>
#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <tuple>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsilab/core.hpp"

namespace lsilab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parsed experiment description: one flat key/value section per file.
// Numeric keys hold grids (comma-separated lists, scalars are length-1);
// the Cartesian product of the grids is the sweep.
struct ExperimentConfig {
  std::string experiment;
  std::map<std::string, std::vector<double>> grids;
  std::uint64_t seed = 0;
  int workers = 0;  // 0 picks the available hardware parallelism
  std::string out;  // empty writes to stdout
  std::string format = "json";

  bool has(const std::string& key) const { return grids.count(key) != 0; }

  const std::vector<double>& grid(const std::string& key) const {
    return grids.at(key);
  }

  std::vector<double> grid_or(const std::string& key,
                              std::vector<double> fallback) const {
    auto it = grids.find(key);
    return it == grids.end() ? std::move(fallback) : it->second;
  }

  // Override keys (n_points, restarts, ...) must be single-valued.
  double scalar_or(const std::string& key, double fallback) const {
    auto it = grids.find(key);
    if (it == grids.end()) return fallback;
    if (it->second.size() != 1)
      throw ConfigError("config key '" + key + "' takes a single value");
    return it->second.front();
  }

  int int_scalar_or(const std::string& key, int fallback) const {
    const double v = scalar_or(key, static_cast<double>(fallback));
    if (!(v >= 1.0) || v != static_cast<double>(static_cast<int>(v)))
      throw ConfigError("config key '" + key + "' must be a positive integer");
    return static_cast<int>(v);
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline double parse_number(const std::string& token, int line) {
  if (token == "inf") return infinity;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size() || token.empty() || std::isnan(v))
    throw ConfigError("line " + std::to_string(line) + ": '" + token +
                      "' is not a number");
  return v;
}

inline std::vector<double> parse_list(const std::string& value, int line) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string token;
  while (std::getline(ss, token, ',')) out.push_back(parse_number(trim(token), line));
  if (out.empty())
    throw ConfigError("line " + std::to_string(line) + ": empty value list");
  return out;
}

inline std::uint64_t parse_seed(const std::string& value, int line) {
  if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError("line " + std::to_string(line) +
                      ": seed must be a nonnegative integer");
  errno = 0;
  const std::uint64_t v = std::strtoull(value.c_str(), nullptr, 10);
  if (errno == ERANGE)
    throw ConfigError("line " + std::to_string(line) + ": seed out of range");
  return v;
}

// The per-experiment key allowlists; unknown keys are configuration errors,
// not silently ignored knobs.
inline const std::map<std::string, std::vector<std::string>>& experiment_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"formula_table",
       {"r", "t", "k_ls", "k_poincare", "k_p", "p_exp", "sigma2", "c_sg",
        "kappa", "k_inf", "c0", "c1", "k_chi2", "k_ls_pi", "k_chi2_pi", "k",
        "p", "c", "d", "c_p"}},
      {"gaussian1d_sandwich",
       {"r", "t", "n_points", "window_sigmas", "restarts", "max_iters",
        "ineq_tol"}},
      {"remark3", {"r", "t", "ineq_tol"}},
      {"subgaussian",
       {"r", "t_multiplier", "n_points", "window_sigmas", "restarts",
        "max_iters", "ineq_tol"}},
      {"hypercube_validation",
       {"count", "n_max", "p", "p_exp", "max_support", "restarts", "max_iters",
        "ineq_tol"}},
      {"convergence_study", {"r", "t", "n_points", "window_sigmas"}},
  };
  return keys;
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::map<std::string, int> seen;
  std::vector<std::tuple<std::string, std::string, int>> numeric_entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || key.find_first_not_of(
                           "abcdefghijklmnopqrstuvwxyz0123456789_") != std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": bad key '" + key + "'");
    if (!seen.emplace(key, line_no).second)
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" +
                        key + "' (first on line " + std::to_string(seen[key]) + ")");

    if (key == "experiment") {
      cfg.experiment = value;
    } else if (key == "seed") {
      cfg.seed = detail::parse_seed(value, line_no);
    } else if (key == "workers") {
      const double w = detail::parse_number(value, line_no);
      if (!(w >= 1.0) || w != static_cast<double>(static_cast<int>(w)))
        throw ConfigError("line " + std::to_string(line_no) +
                          ": workers must be a positive integer");
      cfg.workers = static_cast<int>(w);
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "format") {
      cfg.format = value;
    } else {
      numeric_entries.emplace_back(key, value, line_no);
    }
  }

  if (cfg.experiment.empty()) throw ConfigError("missing required key 'experiment'");
  const auto& allowed = detail::experiment_keys();
  const auto kind = allowed.find(cfg.experiment);
  if (kind == allowed.end())
    throw ConfigError("unknown experiment '" + cfg.experiment + "'");
  if (cfg.format != "json" && cfg.format != "csv")
    throw ConfigError("format must be json or csv, got '" + cfg.format + "'");

  for (const auto& [key, value, at] : numeric_entries) {
    bool ok = false;
    for (const std::string& k : kind->second) ok = ok || k == key;
    if (!ok)
      throw ConfigError("line " + std::to_string(at) + ": key '" + key +
                        "' is not accepted by experiment " + cfg.experiment);
    cfg.grids[key] = detail::parse_list(value, at);
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace lsilab
