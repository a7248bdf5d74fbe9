// SPDX-License-Identifier: Apache-2.0
//
// stbem -- spatial-temporal basis expansion channel estimation toolkit
//
// Unit tests for scenario configuration parsing and result reporting.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "stbem/config.hpp"
#include "stbem/report.hpp"

using namespace stbem;

TEST_CASE("defaults carry the reference scenario") {
  const ScenarioConfig cfg = ScenarioConfig::defaults("uplink-mse");
  CHECK(cfg.experiment == "uplink-mse");
  CHECK(cfg.antennas == 128);
  CHECK(cfg.users == 12);
  CHECK(cfg.rays == 100);
  CHECK(cfg.tau == 16);
  CHECK(cfg.bem_order == 4);
  CHECK(cfg.interval == 60);
  CHECK(cfg.groups == 3);
  CHECK(cfg.eta == Catch::Approx(0.95));
  CHECK(cfg.spread_sweep_deg == std::vector<double>{4.0, 12.0, 20.0});
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("per-experiment defaults differ where they must") {
  CHECK(ScenarioConfig::defaults("signature").users == 1);
  CHECK(ScenarioConfig::defaults("signature").rays == 9);
  CHECK(ScenarioConfig::defaults("cebem-fit").symbol_time_s ==
        Catch::Approx(1e-4));
  CHECK(ScenarioConfig::defaults("cebem-fit").interval == 100);
  CHECK(ScenarioConfig::defaults("downlink-mse").interval == 640);
  CHECK(ScenarioConfig::defaults("ber").users == 1);
  CHECK(ScenarioConfig::defaults("ber").train_power_fraction ==
        Catch::Approx(80.0 / 640.0));
  CHECK_THROWS_AS(ScenarioConfig::defaults("nonsense"), config_error);
}

TEST_CASE("round-robin user centers cycle through clusters") {
  ScenarioConfig cfg = ScenarioConfig::defaults("uplink-mse");
  cfg.cluster_centers_deg = {-45.0, -15.0, 15.0, 45.0};
  cfg.users = 12;
  // three users per cluster, offset -1, 0, +1 degrees
  CHECK(cfg.user_center_deg(0) == Catch::Approx(-46.0));
  CHECK(cfg.user_center_deg(1) == Catch::Approx(-16.0));
  CHECK(cfg.user_center_deg(4) == Catch::Approx(-45.0));
  CHECK(cfg.user_center_deg(11) == Catch::Approx(46.0));
}

TEST_CASE("key-value assignment parses and validates") {
  ScenarioConfig cfg = ScenarioConfig::defaults("uplink-mse");
  apply_config_key(cfg, "antennas", "64");
  CHECK(cfg.antennas == 64);
  apply_config_key(cfg, "snr_db", "0, 5, 10");
  CHECK(cfg.snr_db == std::vector<double>{0.0, 5.0, 10.0});
  apply_config_key(cfg, "seed", "12345678901234");
  CHECK(cfg.seed == 12345678901234ull);
  apply_config_key(cfg, "eta", "0.9");
  CHECK(cfg.eta == Catch::Approx(0.9));
  CHECK_THROWS_AS(apply_config_key(cfg, "no_such_key", "1"), config_error);
  CHECK_THROWS_AS(apply_config_key(cfg, "antennas", "abc"), config_error);
  CHECK_THROWS_AS(apply_config_key(cfg, "antennas", "12.5"), config_error);
  CHECK_THROWS_AS(apply_config_key(cfg, "eta", "0.5extra"), config_error);
}

TEST_CASE("validation rejects out-of-range scenarios") {
  ScenarioConfig cfg = ScenarioConfig::defaults("uplink-mse");
  cfg.bem_order = 3;  // must be even
  CHECK_THROWS_AS(cfg.validate(), config_error);
  cfg = ScenarioConfig::defaults("uplink-mse");
  cfg.eta = 1.0;
  CHECK_THROWS_AS(cfg.validate(), config_error);
  cfg = ScenarioConfig::defaults("uplink-mse");
  cfg.tau = 0;
  CHECK_THROWS_AS(cfg.validate(), config_error);
  cfg = ScenarioConfig::defaults("ber");
  cfg.train_power_fraction = 1.0;
  CHECK_THROWS_AS(cfg.validate(), config_error);
}

TEST_CASE("config files load with comments and blank lines") {
  const std::string path = "test_config_tmp.cfg";
  {
    std::ofstream f(path);
    f << "# scenario override\n\n"
      << "antennas = 32\n"
      << "snr_db = 0,10\n"
      << "trials = 7   # trailing comment\n";
  }
  ScenarioConfig cfg = ScenarioConfig::defaults("uplink-mse");
  load_config_file(cfg, path);
  std::remove(path.c_str());
  CHECK(cfg.antennas == 32);
  CHECK(cfg.snr_db == std::vector<double>{0.0, 10.0});
  CHECK(cfg.trials == 7);
}

TEST_CASE("config file errors carry the line number") {
  const std::string path = "test_config_bad.cfg";
  {
    std::ofstream f(path);
    f << "antennas = 32\n"
      << "bogus line without equals\n";
  }
  ScenarioConfig cfg = ScenarioConfig::defaults("uplink-mse");
  try {
    load_config_file(cfg, path);
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_config_file(cfg, "no_such_file_anywhere.cfg"),
                  config_error);
}

TEST_CASE("result table renders the pinned CSV header and digits") {
  ResultTable t;
  t.add({"uplink-mse", 15.0, "stbem_as4", "nmse", 0.0123456789012, 500, 1});
  t.add({"uplink-mse", 15.0, "conv_as4", "nmse", 3.0, 500, 1});
  std::ostringstream out;
  t.write_csv(out);
  CHECK(out.str() ==
        "experiment,snr_db,method,metric,value,trials,seed\n"
        "uplink-mse,15,stbem_as4,nmse,0.0123456789,500,1\n"
        "uplink-mse,15,conv_as4,nmse,3,500,1\n");
}

TEST_CASE("result rows are validated on insert") {
  ResultTable t;
  CHECK_THROWS_AS(
      t.add({"x", 0.0, "m", "nmse", std::nan(""), 1, 1}), numerical_error);
  CHECK_THROWS_AS(t.add({"x", 0.0, "m", "ber", 1.5, 1, 1}), numerical_error);
  CHECK_THROWS_AS(t.add({"x", 0.0, "m", "nmse", -0.1, 1, 1}), numerical_error);
  CHECK_NOTHROW(t.add({"x", 0.0, "m", "ber", 0.5, 1, 1}));
}

TEST_CASE("json mirror carries the same rows") {
  ResultTable t;
  t.add({"ber", 6.0, "perfect", "ber", 0.25, 10, 3});
  const std::string path = "test_report_tmp.json";
  t.write_json_file(path);
  std::ifstream f(path);
  std::stringstream buf;
  buf << f.rdbuf();
  std::remove(path.c_str());
  const std::string s = buf.str();
  CHECK(s.find("\"experiment\": \"ber\"") != std::string::npos);
  CHECK(s.find("\"value\": 0.25") != std::string::npos);
  CHECK(s.find("\"seed\": 3") != std::string::npos);
}
