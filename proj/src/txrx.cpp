// SPDX-License-Identifier: Apache-2.0

#include "leosim/txrx.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace leosim {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

Eigen::MatrixXcd direction_matrix(std::span<const UserChannelStats> stats,
                                  const UpaConfig& cfg) {
  Eigen::MatrixXcd v(cfg.count(), static_cast<Eigen::Index>(stats.size()));
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    v.col(i) = upa_response(cfg, stats[static_cast<std::size_t>(i)].angles);
  }
  return v;
}

Eigen::VectorXd gamma_vector(std::span<const UserChannelStats> stats) {
  Eigen::VectorXd g(static_cast<Eigen::Index>(stats.size()));
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    g(i) = stats[static_cast<std::size_t>(i)].gamma;
  }
  return g;
}

}  // namespace

LinkBudget::LinkBudget(Eigen::VectorXd dl, double ul)
    : rho_dl(std::move(dl)), rho_ul(ul) {
  require(rho_ul > 0.0 && std::isfinite(rho_ul),
          "LinkBudget: rho_ul must be positive and finite");
  for (Eigen::Index i = 0; i < rho_dl.size(); ++i) {
    require(rho_dl(i) > 0.0 && std::isfinite(rho_dl(i)),
            "LinkBudget: every rho_dl must be positive and finite");
  }
}

Eigen::MatrixXcd regularized_directions(const Eigen::MatrixXcd& columns,
                                        const Eigen::VectorXd& gamma,
                                        double rho) {
  require(columns.cols() >= 1, "regularized_directions: need K >= 1 columns");
  require(columns.cols() == gamma.size(),
          "regularized_directions: gamma size mismatch");
  require(rho > 0.0 && std::isfinite(rho),
          "regularized_directions: rho must be positive and finite");
  require(columns.allFinite(), "regularized_directions: non-finite channel");
  require((gamma.array() > 0.0).all(),
          "regularized_directions: gamma must be positive");

  // (C Gamma C^H + I/rho)^{-1} C = W (W^H W + I/rho)^{-1} Gamma^{-1/2}
  // with W = C Gamma^{1/2}; the K x K system is Hermitian PD.
  const Eigen::VectorXd root = gamma.array().sqrt();
  const Eigen::MatrixXcd w = columns * root.asDiagonal();
  Eigen::MatrixXcd h = w.adjoint() * w;
  h.diagonal().array() += 1.0 / rho;
  Eigen::MatrixXcd rhs = root.cwiseInverse().asDiagonal();
  return w * Eigen::LLT<Eigen::MatrixXcd>(h).solve(rhs);
}

Precoder slnr_icsi_precoder(const Eigen::MatrixXcd& channels, int k,
                            double rho_k) {
  require(k >= 0 && k < channels.cols(), "slnr_icsi_precoder: bad UT index");
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(channels.cols());
  const Eigen::VectorXcd raw =
      regularized_directions(channels, ones, rho_k).col(k);
  return {raw.conjugate() / raw.norm()};
}

double slnr_of(const Precoder& b, const Eigen::MatrixXcd& channels, int k,
               double rho_k) {
  require(k >= 0 && k < channels.cols(), "slnr_of: bad UT index");
  const Eigen::VectorXcd proj = channels.transpose() * b.vector;
  const double signal = std::norm(proj(k));
  const double leakage = proj.squaredNorm() - signal;
  return signal / (leakage + 1.0 / rho_k);
}

Receiver sinr_icsi_receiver(const Eigen::MatrixXcd& channels_ul, int k,
                            double rho_ul) {
  require(k >= 0 && k < channels_ul.cols(), "sinr_icsi_receiver: bad index");
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(channels_ul.cols());
  return {regularized_directions(channels_ul, ones, rho_ul)
              .col(k)
              .conjugate()};
}

double sinr_of(const Receiver& w, const Eigen::MatrixXcd& channels_ul, int k,
               double rho_ul) {
  require(k >= 0 && k < channels_ul.cols(), "sinr_of: bad UT index");
  const Eigen::VectorXcd proj = channels_ul.transpose() * w.vector;
  const double signal = std::norm(proj(k));
  const double interference = proj.squaredNorm() - signal;
  return signal / (interference + w.vector.squaredNorm() / rho_ul);
}

Precoder aslnr_precoder(std::span<const UserChannelStats> stats, int k,
                        double rho_k, const UpaConfig& cfg) {
  require(k >= 0 && k < static_cast<int>(stats.size()),
          "aslnr_precoder: bad UT index");
  const Eigen::MatrixXcd v = direction_matrix(stats, cfg);
  const Eigen::VectorXcd raw =
      regularized_directions(v, gamma_vector(stats), rho_k).col(k);
  return {raw.conjugate() / raw.norm()};
}

double aslnr_of(const Precoder& b, std::span<const UserChannelStats> stats,
                int k, double rho_k, const UpaConfig& cfg) {
  require(k >= 0 && k < static_cast<int>(stats.size()),
          "aslnr_of: bad UT index");
  const Eigen::MatrixXcd v = direction_matrix(stats, cfg);
  const Eigen::VectorXd gamma = gamma_vector(stats);
  const Eigen::VectorXcd proj = v.transpose() * b.vector;
  double signal = 0.0;
  double leakage = 0.0;
  for (Eigen::Index i = 0; i < proj.size(); ++i) {
    const double p = gamma(i) * std::norm(proj(i));
    if (i == k) {
      signal = p;
    } else {
      leakage += p;
    }
  }
  return signal / (leakage + 1.0 / rho_k);
}

double max_aslnr(std::span<const UserChannelStats> stats, int k, double rho_k,
                 const UpaConfig& cfg) {
  require(k >= 0 && k < static_cast<int>(stats.size()),
          "max_aslnr: bad UT index");
  const Eigen::MatrixXcd v = direction_matrix(stats, cfg);
  const Eigen::VectorXcd raw =
      regularized_directions(v, gamma_vector(stats), rho_k).col(k);
  const double quad = (v.col(k).adjoint() * raw).real()(0);
  return 1.0 / (1.0 - stats[static_cast<std::size_t>(k)].gamma * quad) - 1.0;
}

Receiver asinr_receiver(std::span<const UserChannelStats> stats, int k,
                        double rho_ul, const UpaConfig& cfg) {
  require(k >= 0 && k < static_cast<int>(stats.size()),
          "asinr_receiver: bad UT index");
  const Eigen::MatrixXcd u = direction_matrix(stats, cfg);
  return {regularized_directions(u, gamma_vector(stats), rho_ul)
              .col(k)
              .conjugate()};
}

double asinr_of(const Receiver& w, std::span<const UserChannelStats> stats,
                int k, double rho_ul, const UpaConfig& cfg) {
  require(k >= 0 && k < static_cast<int>(stats.size()),
          "asinr_of: bad UT index");
  const Eigen::MatrixXcd u = direction_matrix(stats, cfg);
  const Eigen::VectorXd gamma = gamma_vector(stats);
  const Eigen::VectorXcd proj = u.transpose() * w.vector;
  double signal = 0.0;
  double interference = 0.0;
  for (Eigen::Index i = 0; i < proj.size(); ++i) {
    const double p = gamma(i) * std::norm(proj(i));
    if (i == k) {
      signal = p;
    } else {
      interference += p;
    }
  }
  return signal / (interference + w.vector.squaredNorm() / rho_ul);
}

double max_asinr(std::span<const UserChannelStats> stats, int k, double rho_ul,
                 const UpaConfig& cfg) {
  return max_aslnr(stats, k, rho_ul, cfg);
}

std::pair<Precoder, Receiver> mf_limit(std::span<const UserChannelStats> stats,
                                       int k, const UpaConfig& cfg) {
  require(k >= 0 && k < static_cast<int>(stats.size()),
          "mf_limit: bad UT index");
  const Eigen::VectorXcd conj =
      upa_response(cfg, stats[static_cast<std::size_t>(k)].angles).conjugate();
  return {Precoder{conj}, Receiver{conj}};
}

namespace {
int nearest_grid_node(double angle, int m_d) {
  // Nodes at -1 + 2n/m_d; ties at half spacing round to the lower index.
  const double x = (angle + 1.0) * m_d / 2.0;
  int n = static_cast<int>(std::ceil(x - 0.5));
  return std::clamp(n, 0, m_d - 1);
}
}  // namespace

DftFixed dft_fixed(const UpaConfig& cfg, const SpaceAngles& angles) {
  DftFixed out;
  out.n_x = nearest_grid_node(angles.theta_x, cfg.m_x);
  out.n_y = nearest_grid_node(angles.theta_y, cfg.m_y);
  const SpaceAngles snapped(-1.0 + 2.0 * out.n_x / cfg.m_x,
                            -1.0 + 2.0 * out.n_y / cfg.m_y);
  const Eigen::VectorXcd conj = upa_response(cfg, snapped).conjugate();
  out.precoder = Precoder{conj};
  out.receiver = Receiver{conj};
  return out;
}

double duality_gap(std::span<const UserChannelStats> stats, int k,
                   double rho_dl_k, double rho_ul, const UpaConfig& cfg) {
  const Precoder b = aslnr_precoder(stats, k, rho_dl_k, cfg);
  const Receiver w = asinr_receiver(stats, k, rho_ul, cfg);
  const double overlap =
      std::abs((b.vector.adjoint() * w.vector)(0)) / w.vector.norm();
  return 1.0 - overlap;
}

}  // namespace leosim
