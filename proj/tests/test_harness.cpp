// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <sstream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <doctest.h>

#include "leosim/experiment.hpp"

using namespace leosim;

namespace {

std::string csv_of(const ExperimentConfig& cfg) {
  std::ostringstream os;
  write_csv(os, run_experiment(cfg));
  return os.str();
}

}  // namespace

TEST_CASE("config parsing covers every section and key") {
  std::istringstream is(
      "# full configuration\n"
      "[array]\n"
      "m_x = 8\n"
      "m_y = 4   ; trailing comment\n"
      "[grouping]\n"
      "g = 1, 2, 4\n"
      "baseline = fr4\n"
      "[channel]\n"
      "kappa_db = 6.5\n"
      "gamma = 12.5\n"
      "[experiment]\n"
      "snr_db = -5, 0, 5\n"
      "strategies = sCSI-ASLNR, MF, sCSI-est25\n"
      "users = 40\n"
      "mode = both\n"
      "trials = 64\n"
      "seed = 99\n"
      "out = sweep.csv\n");
  const ExperimentConfig cfg = parse_config(is);
  CHECK(cfg.upa.m_x == 8);
  CHECK(cfg.upa.m_y == 4);
  REQUIRE(cfg.groupings.size() == 3);
  CHECK(cfg.groupings[1] == std::pair<int, int>{2, 2});
  CHECK(cfg.baseline == "fr4");
  CHECK(cfg.kappa_db == doctest::Approx(6.5));
  CHECK(cfg.gamma == doctest::Approx(12.5));
  REQUIRE(cfg.snr_db_list.size() == 3);
  CHECK(cfg.snr_db_list[0] == doctest::Approx(-5.0));
  REQUIRE(cfg.strategies.size() == 3);
  CHECK(cfg.strategies[2] == "sCSI-est25");
  CHECK(cfg.n_users == 40);
  CHECK(cfg.mode == "both");
  CHECK(cfg.trials == 64);
  CHECK(cfg.seed == 99);
  CHECK(cfg.output_path == "sweep.csv");
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config parsing overrides a preset base") {
  std::istringstream is("[experiment]\ntrials = 10\nseed = 3\n");
  const ExperimentConfig cfg = parse_config(is, preset_config("fig2"));
  CHECK(cfg.trials == 10);
  CHECK(cfg.seed == 3);
  CHECK(cfg.upa.m_x == 16);  // preset fields survive
  CHECK(cfg.strategies.size() == 3);
}

TEST_CASE("malformed configuration is rejected with line numbers") {
  std::istringstream bad_key("[array]\nm_z = 4\n");
  CHECK_THROWS_AS(parse_config(bad_key), ConfigError);
  std::istringstream bad_value("[experiment]\ntrials = soon\n");
  CHECK_THROWS_AS(parse_config(bad_value), ConfigError);
  std::istringstream no_eq("[experiment]\ntrials\n");
  CHECK_THROWS_AS(parse_config(no_eq), ConfigError);
  std::istringstream bad_section("[experiment\ntrials = 4\n");
  CHECK_THROWS_AS(parse_config(bad_section), ConfigError);
  // unknown strategy tags pass parsing and are caught by validate()
  std::istringstream bad_tag("[experiment]\nstrategies = ZF\n");
  ExperimentConfig tagged = parse_config(bad_tag, preset_config("fig2"));
  CHECK_THROWS_AS(tagged.validate(), ConfigError);

  try {
    std::istringstream is("\n\n[array]\nm_z = 4\n");
    parse_config(is);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
}

TEST_CASE("validate rejects inconsistent settings") {
  ExperimentConfig cfg = preset_config("fig2");
  CHECK_NOTHROW(cfg.validate());

  ExperimentConfig c1 = cfg;
  c1.upa.m_x = 3;
  CHECK_THROWS_AS(c1.validate(), ConfigError);
  ExperimentConfig c2 = cfg;
  c2.trials = 1;
  CHECK_THROWS_AS(c2.validate(), ConfigError);
  ExperimentConfig c3 = cfg;
  c3.strategies.clear();
  CHECK_THROWS_AS(c3.validate(), ConfigError);
  ExperimentConfig c4 = cfg;
  c4.mode = "sideways";
  CHECK_THROWS_AS(c4.validate(), ConfigError);
  ExperimentConfig c5 = cfg;
  c5.groupings = {{0, 1}};
  CHECK_THROWS_AS(c5.validate(), ConfigError);
}

TEST_CASE("presets pin the documented sweep shapes") {
  const ExperimentConfig f2 = preset_config("fig2");
  CHECK(f2.upa.m_x == 16);
  CHECK(f2.upa.m_y == 16);
  CHECK(f2.kappa_db == doctest::Approx(10.0));
  CHECK(f2.groupings == std::vector<std::pair<int, int>>{{1, 1}});
  CHECK(f2.strategies ==
        std::vector<std::string>{"iCSI-SLNR", "sCSI-ASLNR", "sCSI-est50"});
  CHECK(f2.snr_db_list.size() == 7);
  CHECK(f2.snr_db_list.front() == doctest::Approx(-10.0));
  CHECK(f2.snr_db_list.back() == doctest::Approx(20.0));
  CHECK(f2.trials == 2000);

  const ExperimentConfig f3 = preset_config("fig3");
  CHECK(f3.groupings ==
        std::vector<std::pair<int, int>>{{1, 1}, {2, 2}, {4, 4}, {8, 8}});
  CHECK(f3.strategies ==
        std::vector<std::string>{"sCSI-ASLNR", "DFT-fixed", "IntF-upper"});

  const ExperimentConfig f4 = preset_config("fig4");
  CHECK(f4.groupings == std::vector<std::pair<int, int>>{{4, 4}});
  CHECK(f4.snr_db_list == std::vector<double>{20.0});
  CHECK(f4.baseline == "fr4");

  CHECK_THROWS_AS(preset_config("fig9"), ConfigError);
}

TEST_CASE("interference-free baseline equals the analytic upper bound") {
  ExperimentConfig cfg = preset_config("fig3");
  cfg.upa = UpaConfig(4, 4);
  cfg.groupings = {{2, 2}};
  cfg.trials = 32;
  cfg.snr_db_list = {10};
  cfg.strategies = {"sCSI-ASLNR", "IntF-upper"};
  const std::vector<ResultRecord> rec = run_experiment(cfg);
  double scsi_ub = 0.0;
  double intf = 0.0;
  for (const ResultRecord& r : rec) {
    if (r.strategy == "sCSI-ASLNR") scsi_ub = r.r_ub;
    if (r.strategy == "IntF-upper") intf = r.rate;
  }
  CHECK(intf == scsi_ub);
}

TEST_CASE("runs are deterministic across repeats and thread counts") {
  ExperimentConfig cfg = preset_config("fig4");
  cfg.upa = UpaConfig(8, 8);
  cfg.trials = 16;
  cfg.seed = 7;
  const std::string first = csv_of(cfg);
  CHECK(first == csv_of(cfg));
#ifdef _OPENMP
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const std::string one = csv_of(cfg);
  omp_set_num_threads(saved > 1 ? saved : 2);
  const std::string many = csv_of(cfg);
  omp_set_num_threads(saved);
  CHECK(first == one);
  CHECK(first == many);
#endif
}

TEST_CASE("uplink records carry the direction suffix") {
  ExperimentConfig cfg = preset_config("fig2");
  cfg.upa = UpaConfig(4, 4);
  cfg.trials = 8;
  cfg.snr_db_list = {10};
  cfg.strategies = {"sCSI-ASLNR"};
  cfg.mode = "both";
  const std::vector<ResultRecord> rec = run_experiment(cfg);
  REQUIRE(rec.size() == 2);
  CHECK(rec[0].strategy == "sCSI-ASLNR");
  CHECK(rec[1].strategy == "sCSI-ASLNR-UL");
}

TEST_CASE("CSV output matches the frozen golden file") {
  ExperimentConfig cfg = preset_config("fig4");
  cfg.trials = 12;
  cfg.seed = 7;
  const std::string generated = csv_of(cfg);

  std::ifstream golden(std::string(LEOSIM_GOLDEN_DIR) +
                       "/fig4_trials12_seed7.csv");
  REQUIRE(golden.good());
  std::ostringstream expected;
  expected << golden.rdbuf();
  CHECK(generated == expected.str());
}

TEST_CASE("CSV header and shape") {
  ExperimentConfig cfg = preset_config("fig4");
  cfg.upa = UpaConfig(4, 4);
  cfg.trials = 8;
  const std::string csv = csv_of(cfg);
  CHECK(csv.rfind("strategy,M_x,M_y,G,snr_db,kappa_db,trials,seed,rate,"
                  "stderr,r_ub,r_lb,epsilon,delta\n",
                  0) == 0);
  // one sCSI row plus the four-color baseline row
  int lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 3);
}
