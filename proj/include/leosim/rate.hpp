// SPDX-License-Identifier: Apache-2.0

/// Monte Carlo ergodic-rate evaluation for grouped transmission, with the
/// closed-form upper and lower rate bounds and the matrix diagnostics that
/// back the lower-bound constants.
///
/// Every estimator draws the complex channel gains through the same
/// per-trial substream in the same order (groups by ascending key, members
/// in stored order), so different strategies and bounds see common random
/// numbers. Trials may run in parallel; per-trial values are stored and
/// reduced serially in trial order, so results are bit-identical for any
/// thread count.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "leosim/channel.hpp"
#include "leosim/grouping.hpp"
#include "leosim/txrx.hpp"

namespace leosim {

enum class Strategy {
  ScsiAslnr,     ///< statistical-CSI ASLNR precoder / ASINR receiver
  IcsiSlnr,      ///< per-realization SLNR precoder / SINR receiver
  MatchedFilter, ///< conjugate direction vector
  DftFixedBeam,  ///< conjugate nearest DFT grid beam
};

enum class LinkDirection { Downlink, Uplink };

enum class ExecPolicy { Serial, Parallel };

struct McOptions {
  int trials = 2000;
  std::uint64_t seed = 1;
  ExecPolicy policy = ExecPolicy::Parallel;
};

struct RateEstimate {
  double rate = 0.0;      ///< ergodic sum rate, bit/s/Hz, prefactor applied
  double std_error = 0.0; ///< standard error of the Monte Carlo mean
  int trials = 0;
  bool valid = true;      ///< false when a degenerate bound was clamped
};

/// Constants of the closed-form lower bound. All are functions of the
/// per-set correlation level epsilon and the extreme SNR/power values over
/// the whole schedule. When delta >= 1 the guaranteed signal fraction is
/// vacuous; the lower bound is then clamped to zero and flagged invalid.
struct BoundConstants {
  double epsilon = 0.0;
  int k_max = 1;
  double rho_max = 0.0;
  double rho_min = 0.0;
  double gamma_max = 0.0;
  double gamma_min = 0.0;
  double chi = 0.0;
  double delta = 0.0;
  double xi = 0.0;

  bool signal_bound_valid() const { return delta < 1.0; }
  /// Cross-interference coefficient for the (k, i) UT pair.
  double beta(double rho_k, double gamma_k, double gamma_i) const;
};

BoundConstants bound_constants(std::span<const UserChannelStats> stats,
                               const GroupAssignment& assignment,
                               const Eigen::VectorXd& rho, double epsilon);

/// Monte Carlo ergodic sum rate of one strategy over the whole schedule.
/// budget.rho_dl must have one entry per UT. When precoder_stats is
/// non-empty it replaces the true statistics for precoder/receiver design
/// only; gains are always drawn from the true statistics.
RateEstimate ergodic_sum_rate_mc(
    std::span<const UserChannelStats> stats,
    const GroupAssignment& assignment, const LinkBudget& budget,
    Strategy strategy, LinkDirection direction, const McOptions& options,
    std::span<const UserChannelStats> precoder_stats = {});

/// Interference-free upper bound, E[log2(1 + rho_k |g_k|^2)] per UT.
RateEstimate rate_upper_bound_mc(std::span<const UserChannelStats> stats,
                                 const GroupAssignment& assignment,
                                 const LinkBudget& budget,
                                 LinkDirection direction,
                                 const McOptions& options);

/// Closed-form lower bound evaluated by Monte Carlo over the gain
/// distribution: signal fraction (1 - delta), pairwise interference
/// coefficients beta / xi.
RateEstimate rate_lower_bound_mc(std::span<const UserChannelStats> stats,
                                 const GroupAssignment& assignment,
                                 const LinkBudget& budget,
                                 LinkDirection direction,
                                 const BoundConstants& constants,
                                 const McOptions& options);

/// Checks, per served set, the five matrix inequalities behind the lower
/// bound on the regularized gram matrix B = Gamma^{-1}/rho + V^H V.
struct GroupDiagnostics {
  GroupKey key;
  int size = 0;
  double eig_offset_max = 0.0;  ///< max eigenvalue distance to nearest diag
  double eig_offset_bound = 0.0;
  double offdiag_max = 0.0;     ///< max |[B^{-1}]_{k,i}|, k != i
  double offdiag_bound = 0.0;
  double norm_min = 0.0;        ///< min ||unnormalized precoder||^2
  double norm_bound = 0.0;      ///< xi
  double diag_min = 0.0;        ///< min [B^{-1}]_{k,k}
  double diag_bound = 0.0;      ///< chi
  double align_min = 0.0;       ///< min |v_k^H b_k|^2 / ||b_k||^2
  double align_bound = 0.0;     ///< 1 - delta, floored at 0

  bool all_ok() const;
};

/// Evaluates the diagnostics for every served set. Requires a uniform SNR
/// within each set.
std::vector<GroupDiagnostics> appendix_diagnostics(
    std::span<const UserChannelStats> stats,
    const GroupAssignment& assignment, const Eigen::VectorXd& rho,
    const BoundConstants& constants);

/// Moment-based statistics estimate from observed gain samples: gamma from
/// the mean power, kappa from the squared mean over the residual power
/// (clipped to [0, 1e6]). Angles are taken as ground truth.
UserChannelStats scsi_estimate(std::span<const Complex> gain_samples,
                               const SpaceAngles& angles);

/// Convenience overload: draws n_samples gains from the true statistics
/// and estimates from them.
UserChannelStats scsi_estimate(const UserChannelStats& truth, int n_samples,
                               std::mt19937_64& rng);

}  // namespace leosim
