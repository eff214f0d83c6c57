// SPDX-License-Identifier: Apache-2.0

#include "leosim/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "leosim/rng.hpp"

namespace leosim {

namespace {

// Substream offsets keep population/estimation draws disjoint from the
// Monte Carlo trial streams, which use small indices.
constexpr std::uint64_t kUserStreamBase = 0x9000000000000000ull;
constexpr std::uint64_t kEstimateStreamBase = 0xA000000000000000ull;

std::string trim(std::string s) {
  const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && issp(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && issp(s[i])) ++i;
  return s.substr(i);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for '" + key + "': " + s);
  }
}

long long to_int(const std::string& key, const std::string& s) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ConfigError("config: bad integer value for '" + key + "': " + s);
  }
  return v;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

struct ParsedStrategy {
  Strategy strategy = Strategy::ScsiAslnr;
  bool intf_upper = false;
  int estimate_samples = 0;  // > 0: design from estimated statistics
};

ParsedStrategy parse_strategy(const std::string& tag) {
  ParsedStrategy p;
  if (tag == "sCSI-ASLNR") return p;
  if (tag == "iCSI-SLNR") return {Strategy::IcsiSlnr, false, 0};
  if (tag == "MF") return {Strategy::MatchedFilter, false, 0};
  if (tag == "DFT-fixed") return {Strategy::DftFixedBeam, false, 0};
  if (tag == "FR4-conventional") return {Strategy::DftFixedBeam, false, 0};
  if (tag == "IntF-upper") return {Strategy::ScsiAslnr, true, 0};
  if (tag.rfind("sCSI-est", 0) == 0) {
    const long long n = to_int(tag, tag.substr(8));
    if (n < 1) throw ConfigError("config: bad sample count in '" + tag + "'");
    p.estimate_samples = static_cast<int>(n);
    return p;
  }
  throw ConfigError("config: unknown strategy tag '" + tag + "'");
}

std::vector<UserChannelStats> generate_users(const ExperimentConfig& cfg,
                                             int n_users, double gamma,
                                             double kappa,
                                             std::uint64_t stream) {
  std::vector<UserChannelStats> stats;
  stats.reserve(static_cast<std::size_t>(n_users));
  if (!cfg.explicit_users.empty()) {
    for (const SpaceAngles& a : cfg.explicit_users) {
      stats.emplace_back(a, gamma, kappa);
    }
    return stats;
  }
  std::mt19937_64 rng = substream(cfg.seed, stream);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < n_users; ++i) {
    const double tx = unit(rng);
    const double ty = unit(rng);
    stats.emplace_back(SpaceAngles(tx, ty), gamma, kappa);
  }
  return stats;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (upa.m_x < 2 || upa.m_y < 2 || upa.m_x % 2 || upa.m_y % 2) {
    throw ConfigError("config: m_x and m_y must be even and >= 2");
  }
  if (groupings.empty()) throw ConfigError("config: empty grouping list");
  for (const auto& [gx, gy] : groupings) {
    if (gx < 1 || gy < 1) throw ConfigError("config: group counts must be >= 1");
  }
  if (snr_db_list.empty()) throw ConfigError("config: empty SNR list");
  if (strategies.empty()) throw ConfigError("config: empty strategy list");
  for (const std::string& s : strategies) parse_strategy(s);
  if (trials < 2) throw ConfigError("config: trials must be >= 2");
  if (explicit_users.empty() && n_users == 0) {
    throw ConfigError("config: user count must be positive");
  }
  if (mode != "dl" && mode != "ul" && mode != "both") {
    throw ConfigError("config: mode must be dl, ul, or both");
  }
  if (baseline != "none" && baseline != "fr4") {
    throw ConfigError("config: baseline must be none or fr4");
  }
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig cfg;
  cfg.upa = UpaConfig(16, 16);
  cfg.kappa_db = 10.0;
  cfg.snr_db_list = {-10, -5, 0, 5, 10, 15, 20};
  cfg.trials = 2000;
  if (name == "fig2") {
    cfg.groupings = {{1, 1}};
    cfg.strategies = {"iCSI-SLNR", "sCSI-ASLNR", "sCSI-est50"};
  } else if (name == "fig3") {
    cfg.groupings = {{1, 1}, {2, 2}, {4, 4}, {8, 8}};
    cfg.strategies = {"sCSI-ASLNR", "DFT-fixed", "IntF-upper"};
  } else if (name == "fig4") {
    cfg.groupings = {{4, 4}};
    cfg.strategies = {"sCSI-ASLNR"};
    cfg.snr_db_list = {20};
    cfg.baseline = "fr4";
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return cfg;
}

ExperimentConfig parse_config(std::istream& is, const ExperimentConfig& base) {
  ExperimentConfig cfg = base;
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    }
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "array.m_x") {
      cfg.upa.m_x = static_cast<int>(to_int(key, value));
    } else if (key == "array.m_y") {
      cfg.upa.m_y = static_cast<int>(to_int(key, value));
    } else if (key == "grouping.g") {
      cfg.groupings.clear();
      for (const std::string& g : split_list(value)) {
        const int gi = static_cast<int>(to_int(key, g));
        cfg.groupings.emplace_back(gi, gi);
      }
    } else if (key == "grouping.baseline") {
      cfg.baseline = value;
    } else if (key == "channel.kappa_db") {
      cfg.kappa_db = to_double(key, value);
    } else if (key == "channel.gamma") {
      cfg.gamma = value == "auto" ? -1.0 : to_double(key, value);
    } else if (key == "experiment.snr_db") {
      cfg.snr_db_list.clear();
      for (const std::string& s : split_list(value)) {
        cfg.snr_db_list.push_back(to_double(key, s));
      }
    } else if (key == "experiment.strategies") {
      cfg.strategies = split_list(value);
    } else if (key == "experiment.users") {
      cfg.n_users = value == "auto" ? -1
                                    : static_cast<int>(to_int(key, value));
    } else if (key == "experiment.mode") {
      cfg.mode = value;
    } else if (key == "experiment.trials") {
      cfg.trials = static_cast<int>(to_int(key, value));
    } else if (key == "experiment.seed") {
      cfg.seed = static_cast<std::uint64_t>(to_int(key, value));
    } else if (key == "experiment.out") {
      cfg.output_path = value;
    } else {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

RateEstimate intf_upper(std::span<const UserChannelStats> stats,
                        const GroupAssignment& assignment,
                        const LinkBudget& budget, LinkDirection direction,
                        const McOptions& options) {
  return rate_upper_bound_mc(stats, assignment, budget, direction, options);
}

namespace {

struct PreparedPoint {
  GroupAssignment assignment;
  double epsilon = 0.0;
};

void emit_records(std::vector<ResultRecord>& records,
                  const ExperimentConfig& cfg,
                  std::span<const UserChannelStats> stats,
                  const GroupAssignment& assignment, double epsilon, int g,
                  const std::string& tag, const McOptions& options,
                  std::span<const UserChannelStats> design) {
  const ParsedStrategy parsed = parse_strategy(tag);
  const std::vector<LinkDirection> dirs =
      cfg.mode == "dl"
          ? std::vector<LinkDirection>{LinkDirection::Downlink}
          : (cfg.mode == "ul"
                 ? std::vector<LinkDirection>{LinkDirection::Uplink}
                 : std::vector<LinkDirection>{LinkDirection::Downlink,
                                              LinkDirection::Uplink});

  for (double snr_db : cfg.snr_db_list) {
    const double rho = db_to_linear(snr_db);
    const LinkBudget budget(
        Eigen::VectorXd::Constant(static_cast<Eigen::Index>(stats.size()),
                                  rho),
        rho);
    const BoundConstants constants =
        bound_constants(stats, assignment, budget.rho_dl, epsilon);

    for (LinkDirection dir : dirs) {
      const RateEstimate ub =
          rate_upper_bound_mc(stats, assignment, budget, dir, options);
      const RateEstimate lb = rate_lower_bound_mc(stats, assignment, budget,
                                                  dir, constants, options);
      const RateEstimate est =
          parsed.intf_upper
              ? ub
              : ergodic_sum_rate_mc(stats, assignment, budget,
                                    parsed.strategy, dir, options, design);
      ResultRecord rec;
      rec.strategy = dir == LinkDirection::Uplink ? tag + "-UL" : tag;
      rec.m_x = cfg.upa.m_x;
      rec.m_y = cfg.upa.m_y;
      rec.g = g;
      rec.snr_db = snr_db;
      rec.kappa_db = cfg.kappa_db;
      rec.trials = options.trials;
      rec.seed = options.seed;
      rec.rate = est.rate;
      rec.std_error = est.std_error;
      rec.r_ub = ub.rate;
      rec.r_lb = lb.rate;
      rec.epsilon = epsilon;
      rec.delta = constants.delta;
      records.push_back(std::move(rec));
    }
  }
}

}  // namespace

std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const double kappa = db_to_linear(cfg.kappa_db);
  const double gamma_default = static_cast<double>(cfg.upa.count());
  std::vector<ResultRecord> records;

  for (std::size_t gi = 0; gi < cfg.groupings.size(); ++gi) {
    const auto [gx, gy] = cfg.groupings[gi];
    const double gamma = cfg.gamma > 0.0 ? cfg.gamma : gamma_default;
    const int n_users = cfg.n_users > 0
                            ? cfg.n_users
                            : gx * gy * cfg.upa.count();
    const std::vector<UserChannelStats> stats = generate_users(
        cfg, n_users, gamma, kappa, kUserStreamBase + gi);

    const GroupAssignment saug = saug_assign(stats, cfg.upa, gx, gy);
    const double eps = epsilon_of(saug, stats);

    McOptions options;
    options.trials = cfg.trials;
    options.seed = cfg.seed;

    for (const std::string& tag : cfg.strategies) {
      const ParsedStrategy parsed = parse_strategy(tag);
      std::vector<UserChannelStats> design;
      if (parsed.estimate_samples > 0) {
        std::mt19937_64 est_rng = substream(cfg.seed, kEstimateStreamBase + gi);
        design.reserve(stats.size());
        for (const UserChannelStats& s : stats) {
          design.push_back(scsi_estimate(s, parsed.estimate_samples, est_rng));
        }
      }
      emit_records(records, cfg, stats, saug, eps, gx, tag, options, design);
    }

    if (cfg.baseline == "fr4") {
      const GroupAssignment fr4 = fr4_schedule(stats, cfg.upa);
      const double fr4_eps = epsilon_of(fr4, stats);
      emit_records(records, cfg, stats, fr4, fr4_eps, gx, "FR4-conventional",
                   options, {});
    }
  }
  return records;
}

void write_csv(std::ostream& os, const std::vector<ResultRecord>& records) {
  os << "strategy,M_x,M_y,G,snr_db,kappa_db,trials,seed,rate,stderr,"
        "r_ub,r_lb,epsilon,delta\n";
  for (const ResultRecord& r : records) {
    os << r.strategy << ',' << r.m_x << ',' << r.m_y << ',' << r.g << ','
       << fmt(r.snr_db) << ',' << fmt(r.kappa_db) << ',' << r.trials << ','
       << r.seed << ',' << fmt(r.rate) << ',' << fmt(r.std_error) << ','
       << fmt(r.r_ub) << ',' << fmt(r.r_lb) << ',' << fmt(r.epsilon) << ','
       << fmt(r.delta) << '\n';
  }
}

}  // namespace leosim
