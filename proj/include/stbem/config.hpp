// SPDX-License-Identifier: Apache-2.0
//
// stbem -- spatial-temporal basis expansion channel estimation toolkit
//
// Scenario configuration: typed key-value config files, per-experiment
// defaults, command-line overrides.

#ifndef STBEM_CONFIG_HPP
#define STBEM_CONFIG_HPP

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stbem/errors.hpp"

namespace stbem {

/// Full description of one simulation scenario. Field defaults are the
/// generic ones; per-experiment defaults come from ScenarioConfig::defaults.
struct ScenarioConfig {
  std::string experiment;  // signature | cebem-fit | uplink-mse | downlink-mse | ber

  // array and channel
  int antennas = 128;
  double spacing_ratio = 0.5;
  int users = 12;
  int rays = 100;
  std::vector<double> cluster_centers_deg = {-45.0, -15.0, 15.0, 45.0};
  double angular_spread_deg = 4.0;          // two-sided AS = 2*delta
  std::vector<double> spread_sweep_deg;     // extra AS values (uplink sweep)
  double doppler_hz = 200.0;
  double symbol_time_s = 1e-6;
  int interval = 60;                        // N

  // expansion model
  int tau = 16;
  double eta = 0.95;
  int guard = 4;
  int bem_order = 4;                        // R
  int groups = 3;                           // G (uplink sequences)
  std::vector<int> pilot_budgets;           // downlink T list; empty = {N/8,N/4,N/2}

  // training powers
  double preamble_power = 100.0;
  double wavelength_ratio = 1.0;            // lambda_uplink / lambda_downlink
  double train_power_fraction = 0.5;        // BER frame energy share on pilots

  // monte carlo
  std::vector<double> snr_db = {0, 5, 10, 15, 20, 25, 30, 35};
  int trials = 500;
  std::uint64_t seed = 1;

  // demo-specific
  double placement_jitter_deg = 0.05;       // signature demo ray jitter

  /// Center angle of user k (degrees): round-robin over clusters, users of
  /// one cluster offset by 1 degree steps centered on the cluster center.
  double user_center_deg(int k) const {
    const int C = static_cast<int>(cluster_centers_deg.size());
    const int per = (users + C - 1) / C;
    const double offset = (k / C) - (per - 1) / 2.0;
    return cluster_centers_deg[static_cast<std::size_t>(k % C)] + offset;
  }

  void validate() const {
    auto fail = [](const std::string& msg) { throw config_error(msg); };
    if (experiment != "signature" && experiment != "cebem-fit" &&
        experiment != "uplink-mse" && experiment != "downlink-mse" &&
        experiment != "ber")
      fail("unknown experiment '" + experiment + "'");
    if (antennas < 1) fail("antennas must be >= 1");
    if (!(spacing_ratio > 0.0) || spacing_ratio > 1.0)
      fail("spacing_ratio must be in (0, 1]");
    if (users < 1) fail("users must be >= 1");
    if (rays < 1) fail("rays must be >= 1");
    if (cluster_centers_deg.empty()) fail("cluster_centers_deg must be non-empty");
    for (double c : cluster_centers_deg)
      if (!(c > -90.0) || !(c < 90.0))
        fail("cluster_centers_deg entries must lie in (-90, 90)");
    if (!(angular_spread_deg >= 0.0)) fail("angular_spread_deg must be >= 0");
    if (!(doppler_hz >= 0.0)) fail("doppler_hz must be >= 0");
    if (!(symbol_time_s > 0.0)) fail("symbol_time_s must be > 0");
    if (interval < 1) fail("interval must be >= 1");
    if (tau < 1 || tau > antennas) fail("tau must be in [1, antennas]");
    if (!(eta > 0.0) || !(eta < 1.0)) fail("eta must be in (0, 1)");
    if (guard < 0) fail("guard must be >= 0");
    if (bem_order < 0 || bem_order % 2 != 0) fail("bem_order must be even and >= 0");
    if (groups < 1) fail("groups must be >= 1");
    for (int t : pilot_budgets)
      if (t < 1) fail("pilot_budgets entries must be >= 1");
    if (!(preamble_power > 0.0)) fail("preamble_power must be > 0");
    if (!(wavelength_ratio > 0.0)) fail("wavelength_ratio must be > 0");
    if (!(train_power_fraction > 0.0) || !(train_power_fraction < 1.0))
      fail("train_power_fraction must be in (0, 1)");
    if (snr_db.empty()) fail("snr_db must be non-empty");
    if (trials < 1) fail("trials must be >= 1");
    if (!(placement_jitter_deg >= 0.0)) fail("placement_jitter_deg must be >= 0");
  }

  /// Per-experiment default scenarios.
  static ScenarioConfig defaults(const std::string& experiment) {
    ScenarioConfig c;
    c.experiment = experiment;
    if (experiment == "signature") {
      c.users = 1;
      c.rays = 9;
      c.cluster_centers_deg = {27.0};
      c.trials = 200;
      c.snr_db = {0.0};  // unused; demo is noiseless
    } else if (experiment == "cebem-fit") {
      c.users = 1;
      // center lands on DFT bin 2: asin(2 / (M * spacing_ratio))
      c.cluster_centers_deg = {1.7907876};
      c.symbol_time_s = 1e-4;
      c.interval = 100;
      c.trials = 200;
      c.snr_db = {0.0};  // unused; fit is noiseless
    } else if (experiment == "uplink-mse") {
      c.spread_sweep_deg = {4.0, 12.0, 20.0};
    } else if (experiment == "downlink-mse") {
      c.interval = 640;
    } else if (experiment == "ber") {
      c.users = 1;
      c.cluster_centers_deg = {27.0};
      c.interval = 640;
      c.pilot_budgets = {80};
      c.snr_db = {6, 7, 8, 9, 10, 11, 12};
      c.trials = 900;
      c.train_power_fraction = 80.0 / 640.0;
    } else {
      throw config_error("unknown experiment '" + experiment + "'");
    }
    return c;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    if (!std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("bad numeric value '" + v + "' for key '" + key + "'");
  }
}

inline long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("bad integer value '" + v + "' for key '" + key + "'");
  }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<std::uint64_t>(x);
  } catch (const std::exception&) {
    throw config_error("bad unsigned value '" + v + "' for key '" + key + "'");
  }
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& key, const std::string& v,
                          Parse parse) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw config_error("empty list element for key '" + key + "'");
    out.push_back(static_cast<T>(parse(key, item)));
  }
  if (out.empty()) throw config_error("empty list for key '" + key + "'");
  return out;
}

}  // namespace detail

/// Apply one key=value pair; unknown keys are errors.
inline void apply_config_key(ScenarioConfig& cfg, const std::string& key,
                             const std::string& value) {
  using detail::parse_double;
  using detail::parse_int;
  using detail::parse_list;
  using detail::parse_u64;
  if (key == "experiment") {
    cfg.experiment = value;
  } else if (key == "antennas") {
    cfg.antennas = static_cast<int>(parse_int(key, value));
  } else if (key == "spacing_ratio") {
    cfg.spacing_ratio = parse_double(key, value);
  } else if (key == "users") {
    cfg.users = static_cast<int>(parse_int(key, value));
  } else if (key == "rays") {
    cfg.rays = static_cast<int>(parse_int(key, value));
  } else if (key == "cluster_centers_deg") {
    cfg.cluster_centers_deg = parse_list<double>(key, value, parse_double);
  } else if (key == "angular_spread_deg") {
    cfg.angular_spread_deg = parse_double(key, value);
  } else if (key == "spread_sweep_deg") {
    cfg.spread_sweep_deg = parse_list<double>(key, value, parse_double);
  } else if (key == "doppler_hz") {
    cfg.doppler_hz = parse_double(key, value);
  } else if (key == "symbol_time_s") {
    cfg.symbol_time_s = parse_double(key, value);
  } else if (key == "interval") {
    cfg.interval = static_cast<int>(parse_int(key, value));
  } else if (key == "tau") {
    cfg.tau = static_cast<int>(parse_int(key, value));
  } else if (key == "eta") {
    cfg.eta = parse_double(key, value);
  } else if (key == "guard") {
    cfg.guard = static_cast<int>(parse_int(key, value));
  } else if (key == "bem_order") {
    cfg.bem_order = static_cast<int>(parse_int(key, value));
  } else if (key == "groups") {
    cfg.groups = static_cast<int>(parse_int(key, value));
  } else if (key == "pilot_budgets") {
    cfg.pilot_budgets = parse_list<int>(key, value, parse_int);
  } else if (key == "preamble_power") {
    cfg.preamble_power = parse_double(key, value);
  } else if (key == "wavelength_ratio") {
    cfg.wavelength_ratio = parse_double(key, value);
  } else if (key == "train_power_fraction") {
    cfg.train_power_fraction = parse_double(key, value);
  } else if (key == "snr_db") {
    cfg.snr_db = parse_list<double>(key, value, parse_double);
  } else if (key == "trials") {
    cfg.trials = static_cast<int>(parse_int(key, value));
  } else if (key == "seed") {
    cfg.seed = parse_u64(key, value);
  } else if (key == "placement_jitter_deg") {
    cfg.placement_jitter_deg = parse_double(key, value);
  } else {
    throw config_error("unknown config key '" + key + "'");
  }
}

/// Parse a flat key=value config file ('#' comments, blank lines allowed)
/// on top of an existing configuration.
inline void load_config_file(ScenarioConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error(path + ":" + std::to_string(lineno) +
                         ": expected key=value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty())
      throw config_error(path + ":" + std::to_string(lineno) + ": empty key");
    apply_config_key(cfg, key, value);
  }
}

}  // namespace stbem

#endif  // STBEM_CONFIG_HPP
