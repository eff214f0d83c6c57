// SPDX-License-Identifier: Apache-2.0

#include "leosim/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "leosim/rng.hpp"

namespace leosim {

namespace {
constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}
}  // namespace

UpaConfig::UpaConfig(int mx, int my) : m_x(mx), m_y(my) {
  require(mx >= 2 && mx % 2 == 0, "UpaConfig: m_x must be even and >= 2");
  require(my >= 2 && my % 2 == 0, "UpaConfig: m_y must be even and >= 2");
}

SpaceAngles::SpaceAngles(double tx, double ty) : theta_x(tx), theta_y(ty) {
  require(tx >= -1.0 && tx < 1.0, "SpaceAngles: theta_x outside [-1, 1)");
  require(ty >= -1.0 && ty < 1.0, "SpaceAngles: theta_y outside [-1, 1)");
}

SpaceAngles SpaceAngles::from_physical(double theta_x_rad, double theta_y_rad) {
  double vx = std::sin(theta_y_rad) * std::cos(theta_x_rad);
  double vy = std::cos(theta_y_rad);
  // The closed domain value +1 maps to the last representable angle below 1.
  auto clip = [](double v) {
    return std::min(v, std::nextafter(1.0, 0.0));
  };
  return SpaceAngles(clip(vx), clip(vy));
}

UserChannelStats::UserChannelStats(SpaceAngles a, double g, double k)
    : angles(a), gamma(g), kappa(k) {
  require(std::isfinite(g) && g > 0.0, "UserChannelStats: gamma must be > 0");
  require(std::isfinite(k) && k >= 0.0, "UserChannelStats: kappa must be >= 0");
}

OfdmParams::OfdmParams(int nus, int ncp, double ts)
    : n_us(nus), n_cp(ncp), t_s(ts) {
  require(nus >= 1, "OfdmParams: n_us must be >= 1");
  require(ncp >= 0, "OfdmParams: n_cp must be >= 0");
  require(ts > 0.0, "OfdmParams: t_s must be > 0");
}

Eigen::VectorXcd ula_response(int m, double angle) {
  require(m >= 1, "ula_response: m must be >= 1");
  Eigen::VectorXcd v(m);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (int i = 0; i < m; ++i) {
    v(i) = std::polar(scale, -kPi * i * angle);
  }
  return v;
}

Eigen::VectorXcd upa_response(const UpaConfig& cfg, const SpaceAngles& angles) {
  const Eigen::VectorXcd vx = ula_response(cfg.m_x, angles.theta_x);
  const Eigen::VectorXcd vy = ula_response(cfg.m_y, angles.theta_y);
  Eigen::VectorXcd v(cfg.count());
  for (int p = 0; p < cfg.m_x; ++p) {
    v.segment(p * cfg.m_y, cfg.m_y) = vx(p) * vy;
  }
  return v;
}

Complex sample_gain(const UserChannelStats& stats, std::mt19937_64& rng) {
  const double mean = std::sqrt(stats.kappa * stats.gamma /
                                (2.0 * (stats.kappa + 1.0)));
  const double sd = std::sqrt(stats.gamma / (2.0 * (stats.kappa + 1.0)));
  const auto [n0, n1] = normal_pair(rng);
  return {mean + sd * n0, mean + sd * n1};
}

PathSet synthesize_paths(const UserChannelStats& stats, int p_count,
                         double delay_spread, double doppler_spread,
                         double doppler_sat, double tau_min,
                         std::mt19937_64& rng) {
  require(p_count >= 1, "synthesize_paths: p_count must be >= 1");
  require(delay_spread >= 0.0, "synthesize_paths: delay_spread must be >= 0");
  require(doppler_spread >= 0.0,
          "synthesize_paths: doppler_spread must be >= 0");

  PathSet ps;
  ps.gains.resize(p_count);
  ps.doppler_ut = Eigen::VectorXd::Zero(p_count);
  ps.delays = Eigen::VectorXd::Constant(p_count, tau_min);
  ps.doppler_sat = doppler_sat;
  ps.tau_min = tau_min;

  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  const double los_amp =
      std::sqrt(stats.kappa * stats.gamma / (stats.kappa + 1.0));
  ps.gains(0) = std::polar(los_amp, phase(rng));

  if (p_count > 1) {
    const double per_path_var =
        stats.gamma / ((stats.kappa + 1.0) * (p_count - 1));
    const double sd = std::sqrt(per_path_var / 2.0);
    std::uniform_real_distribution<double> dop(-doppler_spread, doppler_spread);
    std::uniform_real_distribution<double> del(0.0, delay_spread);
    for (int p = 1; p < p_count; ++p) {
      const auto [n0, n1] = normal_pair(rng);
      ps.gains(p) = Complex(sd * n0, sd * n1);
      ps.doppler_ut(p) = dop(rng);
      ps.delays(p) = tau_min + del(rng);
    }
  }
  return ps;
}

Complex effective_gain(const PathSet& paths, double t, double f) {
  Complex acc{0.0, 0.0};
  for (Eigen::Index p = 0; p < paths.p_count(); ++p) {
    const double tau_ut = paths.delays(p) - paths.tau_min;
    const double phase = 2.0 * kPi * (t * paths.doppler_ut(p) - f * tau_ut);
    acc += paths.gains(p) * std::polar(1.0, phase);
  }
  return acc;
}

Complex common_phase(const PathSet& paths, double t, double f) {
  return std::polar(1.0,
                    2.0 * kPi * (t * paths.doppler_sat - f * paths.tau_min));
}

namespace {
void check_subcarrier(const OfdmParams& ofdm, int subcarrier) {
  if (subcarrier < 0 || subcarrier >= ofdm.n_us) {
    throw std::invalid_argument("effective_channel: subcarrier out of range");
  }
}
}  // namespace

ChannelRealization effective_channel(const UpaConfig& cfg,
                                     const UserChannelStats& stats,
                                     const PathSet& paths,
                                     const OfdmParams& ofdm, int symbol,
                                     int subcarrier) {
  check_subcarrier(ofdm, subcarrier);
  const double t = symbol * (ofdm.t_us() + ofdm.t_cp());
  const double f = subcarrier / ofdm.t_us();
  return {upa_response(cfg, stats.angles), effective_gain(paths, t, f)};
}

ChannelRealization effective_channel(const UpaConfig& cfg,
                                     const UserChannelStats& stats,
                                     Complex gain, const OfdmParams& ofdm,
                                     int symbol, int subcarrier) {
  (void)symbol;
  check_subcarrier(ofdm, subcarrier);
  return {upa_response(cfg, stats.angles), gain};
}

}  // namespace leosim
