// SPDX-License-Identifier: Apache-2.0

#include "leosim/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "leosim/rng.hpp"

namespace leosim {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

enum class Kernel { DlCoeff, UlFixed, DlIcsi, UlIcsi };

// Everything one served set needs per trial. Coefficient kernels reduce a
// UT's rate to log2(1 + a x / (b x + 1)) in its own gain power x.
struct SetPlan {
  std::vector<int> members;
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  Eigen::MatrixXd cw;     // |w_k^T u_i|^2 for fixed UL receivers
  Eigen::VectorXd noise;  // ||w_k||^2 / rho_ul
  Eigen::MatrixXcd hv;    // V^H V for per-realization kernels
  Eigen::VectorXd rho;
  double alpha = 0.0;     // shared regularization 1/rho within the set
};

struct McPlan {
  std::vector<SetPlan> sets;
  Kernel kernel = Kernel::DlCoeff;
  bool valid = true;
};

std::vector<UserChannelStats> member_stats(
    std::span<const UserChannelStats> pool, const std::vector<int>& members) {
  std::vector<UserChannelStats> out;
  out.reserve(members.size());
  for (int id : members) out.push_back(pool[static_cast<std::size_t>(id)]);
  return out;
}

Eigen::MatrixXcd true_directions(std::span<const UserChannelStats> stats,
                                 const std::vector<int>& members,
                                 const UpaConfig& cfg) {
  Eigen::MatrixXcd v(cfg.count(), static_cast<Eigen::Index>(members.size()));
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    v.col(i) = upa_response(
        cfg, stats[static_cast<std::size_t>(members[i])].angles);
  }
  return v;
}

Eigen::VectorXd member_rho(const Eigen::VectorXd& rho,
                           const std::vector<int>& members) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(members.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = rho(members[i]);
  return out;
}

bool is_uniform(const Eigen::VectorXd& rho) {
  for (Eigen::Index i = 1; i < rho.size(); ++i) {
    if (rho(i) != rho(0)) return false;
  }
  return true;
}

double shared_alpha(const Eigen::VectorXd& rho) {
  require(is_uniform(rho),
          "per-realization kernel needs a uniform SNR within each set");
  return 1.0 / rho(0);
}

Eigen::VectorXd gamma_of(std::span<const UserChannelStats> stats) {
  Eigen::VectorXd g(static_cast<Eigen::Index>(stats.size()));
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    g(i) = stats[static_cast<std::size_t>(i)].gamma;
  }
  return g;
}

Eigen::VectorXcd fixed_precoder(Strategy strategy,
                                std::span<const UserChannelStats> design,
                                int k, double rho_k, const UpaConfig& cfg,
                                LinkDirection direction, double rho_ul) {
  switch (strategy) {
    case Strategy::ScsiAslnr:
      if (direction == LinkDirection::Uplink) {
        return asinr_receiver(design, k, rho_ul, cfg).vector;
      }
      return aslnr_precoder(design, k, rho_k, cfg).vector;
    case Strategy::MatchedFilter:
      return mf_limit(design, k, cfg).first.vector;
    case Strategy::DftFixedBeam:
      return dft_fixed(cfg, design[static_cast<std::size_t>(k)].angles)
          .precoder.vector;
    default:
      throw std::invalid_argument("fixed_precoder: per-realization strategy");
  }
}

McPlan build_plan(std::span<const UserChannelStats> stats,
                  const GroupAssignment& assignment, const LinkBudget& budget,
                  Strategy strategy, LinkDirection direction,
                  std::span<const UserChannelStats> precoder_stats) {
  require(budget.rho_dl.size() == static_cast<Eigen::Index>(stats.size()),
          "ergodic_sum_rate_mc: rho_dl must have one entry per UT");
  require(precoder_stats.empty() || precoder_stats.size() == stats.size(),
          "ergodic_sum_rate_mc: precoder_stats size mismatch");
  const std::span<const UserChannelStats> design =
      precoder_stats.empty() ? stats : precoder_stats;
  const UpaConfig& cfg = assignment.upa;

  McPlan plan;
  if (strategy == Strategy::IcsiSlnr) {
    plan.kernel = direction == LinkDirection::Downlink ? Kernel::DlIcsi
                                                       : Kernel::UlIcsi;
  } else {
    plan.kernel = direction == LinkDirection::Downlink ? Kernel::DlCoeff
                                                       : Kernel::UlFixed;
  }

  for (const auto& [key, members] : assignment.groups) {
    SetPlan set;
    set.members = members;
    const Eigen::Index n = static_cast<Eigen::Index>(members.size());
    set.rho = member_rho(budget.rho_dl, members);
    const Eigen::MatrixXcd v = true_directions(stats, members, cfg);
    const std::vector<UserChannelStats> dstats = member_stats(design, members);

    switch (plan.kernel) {
      case Kernel::DlIcsi: {
        set.hv = v.adjoint() * v;
        set.alpha = shared_alpha(set.rho);
        break;
      }
      case Kernel::UlIcsi: {
        set.hv = v.adjoint() * v;
        set.alpha = 1.0 / budget.rho_ul;
        break;
      }
      case Kernel::DlCoeff: {
        Eigen::MatrixXd c(n, n);
        if (strategy == Strategy::ScsiAslnr && is_uniform(set.rho)) {
          // All precoders in the set share one regularized K x K solve.
          const Eigen::MatrixXcd vd = true_directions(design, members, cfg);
          const Eigen::MatrixXcd raw =
              regularized_directions(vd, gamma_of(dstats), set.rho(0));
          const Eigen::MatrixXcd proj = v.adjoint() * raw;
          for (Eigen::Index i = 0; i < n; ++i) {
            const double nrm = raw.col(i).squaredNorm();
            for (Eigen::Index k = 0; k < n; ++k) {
              c(k, i) = std::norm(proj(k, i)) / nrm;
            }
          }
        } else {
          for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::VectorXcd b = fixed_precoder(
                strategy, dstats, static_cast<int>(i), set.rho(i), cfg,
                direction, budget.rho_ul);
            const Eigen::VectorXcd proj = v.transpose() * b;
            for (Eigen::Index k = 0; k < n; ++k) c(k, i) = std::norm(proj(k));
          }
        }
        set.a.resize(n);
        set.b.resize(n);
        for (Eigen::Index k = 0; k < n; ++k) {
          set.a(k) = c(k, k) * set.rho(k);
          double intf = 0.0;
          for (Eigen::Index i = 0; i < n; ++i) {
            if (i != k) intf += c(k, i) * set.rho(i);
          }
          set.b(k) = intf;
        }
        break;
      }
      case Kernel::UlFixed: {
        set.cw.resize(n, n);
        set.noise.resize(n);
        if (strategy == Strategy::ScsiAslnr) {
          const Eigen::MatrixXcd vd = true_directions(design, members, cfg);
          const Eigen::MatrixXcd raw =
              regularized_directions(vd, gamma_of(dstats), budget.rho_ul);
          const Eigen::MatrixXcd proj = raw.adjoint() * v;
          for (Eigen::Index k = 0; k < n; ++k) {
            for (Eigen::Index i = 0; i < n; ++i) {
              set.cw(k, i) = std::norm(proj(k, i));
            }
            set.noise(k) = raw.col(k).squaredNorm() / budget.rho_ul;
          }
        } else {
          for (Eigen::Index k = 0; k < n; ++k) {
            const Eigen::VectorXcd w = fixed_precoder(
                strategy, dstats, static_cast<int>(k), set.rho(k), cfg,
                direction, budget.rho_ul);
            const Eigen::VectorXcd proj = v.transpose() * w;
            for (Eigen::Index i = 0; i < n; ++i) {
              set.cw(k, i) = std::norm(proj(i));
            }
            set.noise(k) = w.squaredNorm() / budget.rho_ul;
          }
        }
        break;
      }
    }
    plan.sets.push_back(std::move(set));
  }
  return plan;
}

double coeff_rate(double a, double b, double x) {
  return std::log2(1.0 + a * x / (b * x + 1.0));
}

// Per-realization kernel shared by DL precoding and UL receiving: with
// gram F = (H + alpha I)^{-1}, the cross terms are I - alpha F and the
// unnormalized filter energies are diag(F - alpha F^2).
double icsi_set_rate(const SetPlan& set, const Eigen::VectorXcd& gains,
                     bool uplink, double rho_ul) {
  const Eigen::Index n = gains.size();
  Eigen::MatrixXcd h(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      h(i, j) = std::conj(gains(i)) * set.hv(i, j) * gains(j);
    }
  }
  h.diagonal().array() += set.alpha;
  const Eigen::MatrixXcd f =
      Eigen::LLT<Eigen::MatrixXcd>(h).solve(Eigen::MatrixXcd::Identity(n, n));
  Eigen::MatrixXcd cross = -set.alpha * f;
  cross.diagonal().array() += 1.0;
  Eigen::VectorXd norm(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    norm(i) = f(i, i).real() - set.alpha * f.col(i).squaredNorm();
  }

  double sum = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (uplink) {
      double intf = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (i != k) intf += std::norm(cross(k, i));
      }
      sum += std::log2(1.0 + std::norm(cross(k, k)) /
                                 (intf + norm(k) / rho_ul));
    } else {
      double intf = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (i != k) intf += std::norm(cross(k, i)) / norm(i) * set.rho(i);
      }
      sum += std::log2(1.0 + std::norm(cross(k, k)) / norm(k) * set.rho(k) /
                                 (intf + 1.0));
    }
  }
  return sum;
}

double trial_sum_rate(const McPlan& plan,
                      std::span<const UserChannelStats> stats, double rho_ul,
                      std::uint64_t seed, std::uint64_t trial) {
  std::mt19937_64 rng = substream(seed, trial);
  double sum = 0.0;
  for (const SetPlan& set : plan.sets) {
    const Eigen::Index n = static_cast<Eigen::Index>(set.members.size());
    Eigen::VectorXcd gains(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      gains(i) = sample_gain(
          stats[static_cast<std::size_t>(set.members[i])], rng);
    }
    switch (plan.kernel) {
      case Kernel::DlCoeff:
        for (Eigen::Index k = 0; k < n; ++k) {
          sum += coeff_rate(set.a(k), set.b(k), std::norm(gains(k)));
        }
        break;
      case Kernel::UlFixed:
        for (Eigen::Index k = 0; k < n; ++k) {
          double intf = 0.0;
          for (Eigen::Index i = 0; i < n; ++i) {
            if (i != k) intf += set.cw(k, i) * std::norm(gains(i));
          }
          sum += std::log2(1.0 + set.cw(k, k) * std::norm(gains(k)) /
                                     (intf + set.noise(k)));
        }
        break;
      case Kernel::DlIcsi:
        sum += icsi_set_rate(set, gains, false, rho_ul);
        break;
      case Kernel::UlIcsi:
        sum += icsi_set_rate(set, gains, true, rho_ul);
        break;
    }
  }
  return sum;
}

RateEstimate run_mc(const McPlan& plan, std::span<const UserChannelStats> stats,
                    const GroupAssignment& assignment, double rho_ul,
                    const McOptions& options) {
  require(options.trials >= 2, "run_mc: need at least 2 trials");
  std::vector<double> values(static_cast<std::size_t>(options.trials));

  if (options.policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
    for (int t = 0; t < options.trials; ++t) {
      values[static_cast<std::size_t>(t)] = trial_sum_rate(
          plan, stats, rho_ul, options.seed, static_cast<std::uint64_t>(t));
    }
  } else {
    for (int t = 0; t < options.trials; ++t) {
      values[static_cast<std::size_t>(t)] = trial_sum_rate(
          plan, stats, rho_ul, options.seed, static_cast<std::uint64_t>(t));
    }
  }

  // Ordered compensated reduction keeps the result independent of the
  // thread count.
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  const double mean = sum / options.trials;
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  const double sem =
      std::sqrt(sq / (static_cast<double>(options.trials) *
                      (options.trials - 1)));

  RateEstimate est;
  est.trials = options.trials;
  est.rate = assignment.slot_prefactor() * mean;
  est.std_error = assignment.slot_prefactor() * sem;
  est.valid = plan.valid;
  return est;
}

}  // namespace

double BoundConstants::beta(double rho_k, double gamma_k,
                            double gamma_i) const {
  const double top = rho_max * gamma_max;
  const double denom = rho_k * gamma_i * gamma_k;
  const double scale = (top * top) / denom;
  const double corr = (k_max - 1) * epsilon;
  return scale * scale * corr * corr;
}

BoundConstants bound_constants(std::span<const UserChannelStats> stats,
                               const GroupAssignment& assignment,
                               const Eigen::VectorXd& rho, double epsilon) {
  require(rho.size() == static_cast<Eigen::Index>(stats.size()),
          "bound_constants: rho must have one entry per UT");
  require(epsilon >= 0.0, "bound_constants: epsilon must be non-negative");
  BoundConstants c;
  c.epsilon = epsilon;
  c.rho_max = -1.0;
  c.rho_min = std::numeric_limits<double>::max();
  c.gamma_max = -1.0;
  c.gamma_min = std::numeric_limits<double>::max();
  for (const auto& [key, members] : assignment.groups) {
    c.k_max = std::max(c.k_max, static_cast<int>(members.size()));
    for (int id : members) {
      c.rho_max = std::max(c.rho_max, rho(id));
      c.rho_min = std::min(c.rho_min, rho(id));
      const double g = stats[static_cast<std::size_t>(id)].gamma;
      c.gamma_max = std::max(c.gamma_max, g);
      c.gamma_min = std::min(c.gamma_min, g);
    }
  }
  const double corr = (c.k_max - 1) * epsilon;
  c.chi = 1.0 / (1.0 / (c.rho_min * c.gamma_min) + 1.0 + corr);
  const double rg = c.rho_max * c.gamma_max;
  c.delta = rg * rg * corr * corr / c.chi;
  const double root = 1.0 / c.rho_min + c.gamma_max + c.gamma_max * corr;
  c.xi = 1.0 / (root * root);
  return c;
}

RateEstimate ergodic_sum_rate_mc(
    std::span<const UserChannelStats> stats,
    const GroupAssignment& assignment, const LinkBudget& budget,
    Strategy strategy, LinkDirection direction, const McOptions& options,
    std::span<const UserChannelStats> precoder_stats) {
  const McPlan plan = build_plan(stats, assignment, budget, strategy,
                                 direction, precoder_stats);
  return run_mc(plan, stats, assignment, budget.rho_ul, options);
}

RateEstimate rate_upper_bound_mc(std::span<const UserChannelStats> stats,
                                 const GroupAssignment& assignment,
                                 const LinkBudget& budget,
                                 LinkDirection direction,
                                 const McOptions& options) {
  require(budget.rho_dl.size() == static_cast<Eigen::Index>(stats.size()),
          "rate_upper_bound_mc: rho_dl must have one entry per UT");
  McPlan plan;
  plan.kernel = Kernel::DlCoeff;
  for (const auto& [key, members] : assignment.groups) {
    SetPlan set;
    set.members = members;
    const Eigen::Index n = static_cast<Eigen::Index>(members.size());
    set.a.resize(n);
    set.b = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      set.a(k) = direction == LinkDirection::Downlink
                     ? budget.rho_dl(members[static_cast<std::size_t>(k)])
                     : budget.rho_ul;
    }
    plan.sets.push_back(std::move(set));
  }
  return run_mc(plan, stats, assignment, budget.rho_ul, options);
}

RateEstimate rate_lower_bound_mc(std::span<const UserChannelStats> stats,
                                 const GroupAssignment& assignment,
                                 const LinkBudget& budget,
                                 LinkDirection direction,
                                 const BoundConstants& constants,
                                 const McOptions& options) {
  require(budget.rho_dl.size() == static_cast<Eigen::Index>(stats.size()),
          "rate_lower_bound_mc: rho_dl must have one entry per UT");
  const double signal_frac =
      constants.signal_bound_valid() ? 1.0 - constants.delta : 0.0;
  McPlan plan;
  plan.kernel = Kernel::DlCoeff;
  plan.valid = constants.signal_bound_valid();
  for (const auto& [key, members] : assignment.groups) {
    SetPlan set;
    set.members = members;
    const Eigen::Index n = static_cast<Eigen::Index>(members.size());
    set.a.resize(n);
    set.b.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const int kid = members[static_cast<std::size_t>(k)];
      const double rho_k = direction == LinkDirection::Downlink
                               ? budget.rho_dl(kid)
                               : budget.rho_ul;
      const double gamma_k = stats[static_cast<std::size_t>(kid)].gamma;
      set.a(k) = signal_frac * rho_k;
      double intf = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (i == k) continue;
        const int iid = members[static_cast<std::size_t>(i)];
        const double rho_i = direction == LinkDirection::Downlink
                                 ? budget.rho_dl(iid)
                                 : budget.rho_ul;
        intf += constants.beta(rho_k, gamma_k,
                               stats[static_cast<std::size_t>(iid)].gamma) /
                constants.xi * rho_i;
      }
      set.b(k) = intf;
    }
    plan.sets.push_back(std::move(set));
  }
  return run_mc(plan, stats, assignment, budget.rho_ul, options);
}

bool GroupDiagnostics::all_ok() const {
  const auto le = [](double x, double y) {
    return x <= y * (1.0 + 1e-9) + 1e-12;
  };
  return le(eig_offset_max, eig_offset_bound) &&
         le(offdiag_max, offdiag_bound) && le(norm_bound, norm_min) &&
         le(diag_bound, diag_min) && le(align_bound, align_min);
}

std::vector<GroupDiagnostics> appendix_diagnostics(
    std::span<const UserChannelStats> stats,
    const GroupAssignment& assignment, const Eigen::VectorXd& rho,
    const BoundConstants& constants) {
  require(rho.size() == static_cast<Eigen::Index>(stats.size()),
          "appendix_diagnostics: rho must have one entry per UT");
  const UpaConfig& cfg = assignment.upa;
  const double corr = (constants.k_max - 1) * constants.epsilon;
  std::vector<GroupDiagnostics> out;

  for (const auto& [key, members] : assignment.groups) {
    const Eigen::Index n = static_cast<Eigen::Index>(members.size());
    GroupDiagnostics d;
    d.key = key;
    d.size = static_cast<int>(n);
    d.eig_offset_bound = corr;
    d.offdiag_bound = constants.rho_max * constants.gamma_max *
                      constants.rho_max * constants.gamma_max * corr;
    d.norm_bound = constants.xi;
    d.diag_bound = constants.chi;
    d.align_bound = std::max(0.0, 1.0 - constants.delta);

    Eigen::MatrixXcd v(cfg.count(), n);
    Eigen::VectorXd gamma(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& s = stats[static_cast<std::size_t>(members[i])];
      v.col(i) = upa_response(cfg, s.angles);
      gamma(i) = s.gamma;
    }
    const Eigen::VectorXd rho_set = member_rho(rho, members);
    const double alpha = shared_alpha(rho_set);

    Eigen::MatrixXcd bmat = v.adjoint() * v;
    bmat.diagonal() += alpha * gamma.cwiseInverse();
    const Eigen::MatrixXcd binv = Eigen::LLT<Eigen::MatrixXcd>(bmat).solve(
        Eigen::MatrixXcd::Identity(n, n));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(bmat,
                                                        Eigen::EigenvaluesOnly);
    d.eig_offset_max = 0.0;
    for (Eigen::Index e = 0; e < n; ++e) {
      double nearest = std::numeric_limits<double>::max();
      for (Eigen::Index p = 0; p < n; ++p) {
        nearest = std::min(nearest, std::abs(eig.eigenvalues()(e) -
                                             bmat(p, p).real()));
      }
      d.eig_offset_max = std::max(d.eig_offset_max, nearest);
    }

    d.offdiag_max = 0.0;
    d.diag_min = std::numeric_limits<double>::max();
    for (Eigen::Index k = 0; k < n; ++k) {
      d.diag_min = std::min(d.diag_min, binv(k, k).real());
      for (Eigen::Index i = 0; i < n; ++i) {
        if (i != k) d.offdiag_max = std::max(d.offdiag_max, std::abs(binv(k, i)));
      }
    }
    if (n == 1) d.offdiag_max = 0.0;

    const Eigen::MatrixXcd raw =
        regularized_directions(v, gamma, rho_set(0));
    d.norm_min = std::numeric_limits<double>::max();
    d.align_min = std::numeric_limits<double>::max();
    for (Eigen::Index k = 0; k < n; ++k) {
      const double nrm = raw.col(k).squaredNorm();
      d.norm_min = std::min(d.norm_min, nrm);
      const double overlap = std::norm((v.col(k).adjoint() * raw.col(k))(0));
      d.align_min = std::min(d.align_min, overlap / nrm);
    }
    out.push_back(d);
  }
  return out;
}

UserChannelStats scsi_estimate(std::span<const Complex> gain_samples,
                               const SpaceAngles& angles) {
  require(!gain_samples.empty(), "scsi_estimate: need at least 1 sample");
  Complex mean = 0.0;
  double power = 0.0;
  for (const Complex& g : gain_samples) {
    mean += g;
    power += std::norm(g);
  }
  mean /= static_cast<double>(gain_samples.size());
  power /= static_cast<double>(gain_samples.size());
  require(power > 0.0, "scsi_estimate: all samples are zero");

  const double los = std::norm(mean);
  const double scatter = power - los;
  const double kappa =
      scatter > 0.0 ? std::clamp(los / scatter, 0.0, 1e6) : 1e6;
  return UserChannelStats(angles, power, kappa);
}

UserChannelStats scsi_estimate(const UserChannelStats& truth, int n_samples,
                               std::mt19937_64& rng) {
  require(n_samples >= 1, "scsi_estimate: need at least 1 sample");
  std::vector<Complex> samples(static_cast<std::size_t>(n_samples));
  for (Complex& g : samples) g = sample_gain(truth, rng);
  return scsi_estimate(samples, truth.angles);
}

}  // namespace leosim
