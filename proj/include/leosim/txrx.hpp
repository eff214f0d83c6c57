// SPDX-License-Identifier: Apache-2.0
//
// Closed-form DL precoders and UL receivers, instantaneous- and
// statistical-CSI variants, their SLNR/ASLNR/SINR/ASINR metrics, the
// matched-filter and DFT-grid limiting forms, and the DL-UL duality check.

#ifndef LEOSIM_TXRX_HPP
#define LEOSIM_TXRX_HPP

#include <span>
#include <utility>

#include <Eigen/Dense>

#include "leosim/channel.hpp"

namespace leosim {

/// Per-UT DL SNRs and the common UL SNR, all linear ratios.
struct LinkBudget {
  Eigen::VectorXd rho_dl;
  double rho_ul = 1.0;

  LinkBudget(Eigen::VectorXd dl, double ul);
};

/// Unit-norm DL precoding vector b_k.
struct Precoder {
  Eigen::VectorXcd vector;
};

/// UL receiving vector w_k; norm unconstrained (SINR is scale invariant).
struct Receiver {
  Eigen::VectorXcd vector;
};

/// Regularized leakage solve shared by every closed form here:
/// returns the columns B = (sum_i gamma_i c_i c_i^H + I/rho)^{-1} C for the
/// direction (or channel) columns C. Solved in the K x K gram domain via
/// the push-through identity with a Hermitian positive-definite Cholesky
/// factorization, never an explicit M x M inverse.
Eigen::MatrixXcd regularized_directions(const Eigen::MatrixXcd& columns,
                                        const Eigen::VectorXd& gamma,
                                        double rho);

// --- instantaneous CSI -----------------------------------------------------

/// SLNR-optimal precoder for UT k given all K full channel columns.
Precoder slnr_icsi_precoder(const Eigen::MatrixXcd& channels, int k,
                            double rho_k);

/// SLNR of precoder b for UT k: |g_k^T b|^2 / (sum_{i!=k}|g_i^T b|^2 + 1/rho).
double slnr_of(const Precoder& b, const Eigen::MatrixXcd& channels, int k,
               double rho_k);

/// SINR-optimal UL receiver (unnormalized) for UT k.
Receiver sinr_icsi_receiver(const Eigen::MatrixXcd& channels_ul, int k,
                            double rho_ul);

/// SINR of receiver w for UT k:
/// |w^T g_k|^2 / (sum_{i!=k}|w^T g_i|^2 + ||w||^2 / rho_ul).
double sinr_of(const Receiver& w, const Eigen::MatrixXcd& channels_ul, int k,
               double rho_ul);

// --- statistical CSI -------------------------------------------------------

/// ASLNR-optimal precoder built from direction vectors and channel powers.
Precoder aslnr_precoder(std::span<const UserChannelStats> stats, int k,
                        double rho_k, const UpaConfig& cfg);

double aslnr_of(const Precoder& b, std::span<const UserChannelStats> stats,
                int k, double rho_k, const UpaConfig& cfg);

/// Closed-form maximum ASLNR: 1/(1 - gamma_k v_k^H A^{-1} v_k) - 1,
/// always within [0, rho_k * gamma_k].
double max_aslnr(std::span<const UserChannelStats> stats, int k, double rho_k,
                 const UpaConfig& cfg);

/// ASINR-optimal UL receiver (unnormalized, u_k taken equal to v_k).
Receiver asinr_receiver(std::span<const UserChannelStats> stats, int k,
                        double rho_ul, const UpaConfig& cfg);

double asinr_of(const Receiver& w, std::span<const UserChannelStats> stats,
                int k, double rho_ul, const UpaConfig& cfg);

double max_asinr(std::span<const UserChannelStats> stats, int k, double rho_ul,
                 const UpaConfig& cfg);

// --- limiting forms --------------------------------------------------------

/// Matched-filter limit of the sCSI pair: b = v_k*, w = u_k*.
std::pair<Precoder, Receiver> mf_limit(std::span<const UserChannelStats> stats,
                                       int k, const UpaConfig& cfg);

struct DftFixed {
  Precoder precoder;
  Receiver receiver;
  int n_x = 0;
  int n_y = 0;
};

/// Fixed DFT-grid precoder/receiver: per-axis nearest grid node
/// -1 + 2n/M_d, n in [0, M_d-1], no wrap; half-spacing ties round to the
/// lower index.
DftFixed dft_fixed(const UpaConfig& cfg, const SpaceAngles& angles);

/// 1 - |<b_k^aslnr, w_k^asinr/||w||>|; zero when rho_dl == rho_ul and
/// u_k == v_k (the two closed forms coincide).
double duality_gap(std::span<const UserChannelStats> stats, int k,
                   double rho_dl_k, double rho_ul, const UpaConfig& cfg);

}  // namespace leosim

#endif  // LEOSIM_TXRX_HPP
