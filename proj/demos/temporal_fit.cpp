// SPDX-License-Identifier: Apache-2.0
//
// stbem -- spatial-temporal basis expansion channel estimation toolkit
//
// Temporal basis fit on the strongest beam bin of a simulated trajectory.
// Writes the sampled trajectory and its order-4 reconstruction as CSV on
// stdout and the fit summary on stderr. An optional argument names a
// config file.

#include <iostream>

#include "stbem/stbem.hpp"

int main(int argc, char** argv) {
  try {
    stbem::ScenarioConfig cfg = stbem::ScenarioConfig::defaults("cebem-fit");
    if (argc > 1) stbem::load_config_file(cfg, argv[1]);
    if (cfg.experiment != "cebem-fit") {
      std::cerr << "temporal_fit: config is for '" << cfg.experiment
                << "', expected 'cebem-fit'\n";
      return 2;
    }
    const stbem::ResultTable table = stbem::run_cebem_fit_demo(cfg, &std::cout);
    table.write_csv(std::cerr);
    return 0;
  } catch (const stbem::config_error& e) {
    std::cerr << "temporal_fit: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "temporal_fit: " << e.what() << '\n';
    return 4;
  }
}
