// SPDX-License-Identifier: Apache-2.0

#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "leosim/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Statistical-CSI massive MIMO LEO satellite link simulator"};

  std::string config_path;
  std::string preset;
  std::string out_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = 0;

  app.add_option("--config", config_path, "structured-text config file");
  app.add_option("--preset", preset, "named preset: fig2, fig3, or fig4")
      ->check(CLI::IsMember({"fig2", "fig3", "fig4"}));
  app.add_option("--seed", seed, "override the experiment seed")
      ->each([&seed_set](const std::string&) { seed_set = true; });
  app.add_option("--trials", trials, "override the Monte Carlo trial count");
  app.add_option("--out", out_path, "override the output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // bad flags and values are configuration errors
  }

  leosim::ExperimentConfig cfg;
  try {
    if (preset.empty() && config_path.empty()) {
      throw leosim::ConfigError("either --config or --preset is required");
    }
    if (!preset.empty()) cfg = leosim::preset_config(preset);
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        throw leosim::ConfigError("cannot open config file: " + config_path);
      }
      cfg = leosim::parse_config(in, cfg);
    }
    if (seed_set) cfg.seed = seed;
    if (trials > 0) cfg.trials = trials;
    if (!out_path.empty()) cfg.output_path = out_path;
    cfg.validate();
  } catch (const leosim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  try {
    const std::vector<leosim::ResultRecord> records =
        leosim::run_experiment(cfg);
    // Buffer the whole CSV so a failed run leaves no partial output file.
    std::ostringstream buf;
    leosim::write_csv(buf, records);
    std::ofstream out(cfg.output_path, std::ios::binary);
    if (!out) {
      std::cerr << "runtime error: cannot write " << cfg.output_path << "\n";
      return 2;
    }
    out << buf.str();
    std::cout << "wrote " << records.size() << " records to "
              << cfg.output_path << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
}
