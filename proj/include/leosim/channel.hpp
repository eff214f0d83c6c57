// SPDX-License-Identifier: Apache-2.0
//
// LEO satellite massive-MIMO channel synthesis: UPA array responses,
// per-UT statistical parameters, multipath ray sets, and the effective
// per-subcarrier channel after Doppler/delay compensation at the UT.

#ifndef LEOSIM_CHANNEL_HPP
#define LEOSIM_CHANNEL_HPP

#include <complex>
#include <random>

#include <Eigen/Dense>

namespace leosim {

using Complex = std::complex<double>;

/// Uniform planar array geometry; antennas on a half-wavelength grid.
/// Both per-axis counts must be even and at least 2.
struct UpaConfig {
  int m_x = 2;
  int m_y = 2;

  UpaConfig() = default;
  UpaConfig(int mx, int my);
  int count() const { return m_x * m_y; }
};

/// Dimensionless space angles, each in [-1, 1). The x component maps the
/// physical angles as sin(theta_y)cos(theta_x); the y component as
/// cos(theta_y). DFT beam columns live on the grid -1 + 2n/M_d.
struct SpaceAngles {
  double theta_x = 0.0;
  double theta_y = 0.0;

  SpaceAngles() = default;
  SpaceAngles(double tx, double ty);
  static SpaceAngles from_physical(double theta_x_rad, double theta_y_rad);
};

/// Per-UT statistical CSI: direction angles, channel power gamma (linear)
/// and Rician factor kappa (linear).
struct UserChannelStats {
  SpaceAngles angles;
  double gamma = 1.0;
  double kappa = 0.0;

  UserChannelStats(SpaceAngles a, double g, double k);
};

/// OFDM numerology; only used to place (symbol, subcarrier) samples on the
/// (t, f) plane of the effective channel gain.
struct OfdmParams {
  int n_us = 1;
  int n_cp = 0;
  double t_s = 1.0;

  OfdmParams(int nus, int ncp, double ts);
  double t_us() const { return n_us * t_s; }
  double t_cp() const { return n_cp * t_s; }
};

/// Multipath ray set of one UT. Path 0 is the LOS ray. The satellite
/// Doppler is common to all paths; delays are absolute, with tau_min the
/// LOS delay.
struct PathSet {
  Eigen::VectorXcd gains;
  double doppler_sat = 0.0;
  Eigen::VectorXd doppler_ut;
  Eigen::VectorXd delays;
  double tau_min = 0.0;

  Eigen::Index p_count() const { return gains.size(); }
};

/// Effective per-subcarrier channel: unit-norm direction times a scalar
/// gain. The full channel vector is direction * gain.
struct ChannelRealization {
  Eigen::VectorXcd direction;
  Complex gain{1.0, 0.0};

  Eigen::VectorXcd vector() const { return direction * gain; }
};

/// ULA response (1/sqrt(m)) [1, e^{-j pi a}, ..., e^{-j pi (m-1) a}].
Eigen::VectorXcd ula_response(int m, double angle);

/// UPA response: Kronecker product of the two per-axis ULA responses.
/// Element at flat index p*m_y + q is x-component p times y-component q.
Eigen::VectorXcd upa_response(const UpaConfig& cfg, const SpaceAngles& angles);

/// One Rician channel-gain draw: real and imaginary parts are i.i.d.
/// Gaussian with mean sqrt(kappa*gamma/(2(kappa+1))) and variance
/// gamma/(2(kappa+1)), so E|g|^2 = gamma.
Complex sample_gain(const UserChannelStats& stats, std::mt19937_64& rng);

/// Ray-level realization consistent with `stats`: deterministic LOS ray of
/// power kappa*gamma/(kappa+1) with a uniform random phase, plus p_count-1
/// equal-power complex Gaussian scattered rays. UT Doppler is uniform in
/// +-doppler_spread and delay offsets uniform in [0, delay_spread]; the LOS
/// ray carries zero UT Doppler and the minimum delay.
PathSet synthesize_paths(const UserChannelStats& stats, int p_count,
                         double delay_spread, double doppler_spread,
                         double doppler_sat, double tau_min,
                         std::mt19937_64& rng);

/// Post-compensation channel gain at time t and frequency f:
/// sum_p g_p exp(j 2 pi [t nu_p^ut - f tau_p^ut]), the satellite Doppler
/// and minimum delay having been removed at the UT.
Complex effective_gain(const PathSet& paths, double t, double f);

/// The removed common factor exp(j 2 pi [t nu_sat - f tau_min]);
/// effective_gain * common_phase reconstructs the raw channel gain.
Complex common_phase(const PathSet& paths, double t, double f);

/// Effective channel over OFDM symbol `symbol` and subcarrier `subcarrier`,
/// sampling the gain at t = symbol*(T_us+T_cp), f = subcarrier/T_us.
ChannelRealization effective_channel(const UpaConfig& cfg,
                                     const UserChannelStats& stats,
                                     const PathSet& paths,
                                     const OfdmParams& ofdm, int symbol,
                                     int subcarrier);

/// Flat-fading variant: the scalar gain is supplied directly.
ChannelRealization effective_channel(const UpaConfig& cfg,
                                     const UserChannelStats& stats,
                                     Complex gain, const OfdmParams& ofdm,
                                     int symbol, int subcarrier);

}  // namespace leosim

#endif  // LEOSIM_CHANNEL_HPP
