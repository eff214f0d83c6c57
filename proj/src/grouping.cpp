// SPDX-License-Identifier: Apache-2.0

#include "leosim/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "leosim/txrx.hpp"

namespace leosim {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

int cell_index(double angle, int m_d, int g_d) {
  require(m_d >= 1 && g_d >= 1, "cell_index: m_d and g_d must be >= 1");
  require(angle >= -1.0 && angle <= 1.0, "cell_index: angle out of [-1, 1]");
  const int cells = m_d * g_d;
  const int c = static_cast<int>(std::floor((angle + 1.0) * cells / 2.0));
  return std::min(c, cells - 1);
}

GroupAssignment saug_assign(std::span<const UserChannelStats> stats,
                            const UpaConfig& cfg, int g_x, int g_y) {
  require(g_x >= 1 && g_y >= 1, "saug_assign: g_x and g_y must be >= 1");
  GroupAssignment out;
  out.upa = cfg;
  out.g_x = g_x;
  out.g_y = g_y;
  out.resource_share = 1.0 / (static_cast<double>(g_x) * g_y);
  out.num_slots = 1;
  out.records.reserve(stats.size());

  // Occupancy per (group, coarse cell): next free slot index.
  std::map<std::array<int, 4>, int> next_slot;
  for (int id = 0; id < static_cast<int>(stats.size()); ++id) {
    const SpaceAngles& a = stats[static_cast<std::size_t>(id)].angles;
    UtRecord rec;
    rec.id = id;
    rec.angles = a;
    rec.cell_x = cell_index(a.theta_x, cfg.m_x, g_x);
    rec.cell_y = cell_index(a.theta_y, cfg.m_y, g_y);
    rec.g = rec.cell_x % g_x;
    rec.r = rec.cell_y % g_y;
    const std::array<int, 4> key{rec.g, rec.r, rec.cell_x / g_x,
                                 rec.cell_y / g_y};
    rec.slot = next_slot[key]++;
    out.num_slots = std::max(out.num_slots, rec.slot + 1);
    out.groups[GroupKey{rec.slot, rec.g, rec.r}].push_back(id);
    out.records.push_back(rec);
  }
  return out;
}

GroupAssignment fr4_schedule(std::span<const UserChannelStats> stats,
                             const UpaConfig& cfg) {
  GroupAssignment out;
  out.upa = cfg;
  out.g_x = 2;
  out.g_y = 2;
  out.resource_share = 0.25;
  out.num_slots = 1;
  out.records.reserve(stats.size());

  // Occupancy per (color, beam node): next free slot index.
  std::map<std::array<int, 4>, int> next_slot;
  for (int id = 0; id < static_cast<int>(stats.size()); ++id) {
    const SpaceAngles& a = stats[static_cast<std::size_t>(id)].angles;
    const DftFixed beam = dft_fixed(cfg, a);
    UtRecord rec;
    rec.id = id;
    rec.angles = a;
    rec.cell_x = beam.n_x;
    rec.cell_y = beam.n_y;
    rec.g = beam.n_x % 2;
    rec.r = beam.n_y % 2;
    const std::array<int, 4> key{rec.g, rec.r, beam.n_x, beam.n_y};
    rec.slot = next_slot[key]++;
    out.num_slots = std::max(out.num_slots, rec.slot + 1);
    out.groups[GroupKey{rec.slot, rec.g, rec.r}].push_back(id);
    out.records.push_back(rec);
  }
  return out;
}

double epsilon_of(const GroupAssignment& assignment,
                  std::span<const UserChannelStats> stats) {
  double eps = 0.0;
  for (const auto& [key, members] : assignment.groups) {
    const Eigen::Index n = static_cast<Eigen::Index>(members.size());
    if (n < 2) continue;
    Eigen::MatrixXcd v(assignment.upa.count(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
      v.col(i) = upa_response(
          assignment.upa,
          stats[static_cast<std::size_t>(members[i])].angles);
    }
    const Eigen::MatrixXcd gram = v.adjoint() * v;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        eps = std::max(eps, std::abs(gram(i, j)));
      }
    }
  }
  return eps;
}

namespace {

// sup over one axis of the normalized Dirichlet kernel magnitude at
// offsets admissible under per-coarse-cell uniqueness: the closest
// admissible offset is 1 - 1/g_d grid steps, and the kernel decays away
// from it.
double axis_factor(int m_d, int g_d) {
  if (g_d == 1) return 1.0;
  const double t = std::numbers::pi * (1.0 - 1.0 / g_d);
  return std::abs(std::sin(t) / (m_d * std::sin(t / m_d)));
}

}  // namespace

double analytic_epsilon_bound(const UpaConfig& cfg, int g_x, int g_y) {
  require(g_x >= 1 && g_y >= 1,
          "analytic_epsilon_bound: g_x and g_y must be >= 1");
  return std::max(axis_factor(cfg.m_x, g_x), axis_factor(cfg.m_y, g_y));
}

void write_report(std::ostream& os, const GroupAssignment& assignment) {
  os << "upa " << assignment.upa.m_x << "x" << assignment.upa.m_y
     << " groups " << assignment.g_x << "x" << assignment.g_y
     << " resource_share " << assignment.resource_share << " slots "
     << assignment.num_slots << "\n";
  for (const auto& [key, members] : assignment.groups) {
    os << "set slot=" << key.slot << " g=" << key.g << " r=" << key.r
       << " size=" << members.size() << "\n";
    for (int id : members) {
      const UtRecord& rec =
          assignment.records[static_cast<std::size_t>(id)];
      os << "  ut " << rec.id << " theta_x=" << rec.angles.theta_x
         << " theta_y=" << rec.angles.theta_y << " cell=(" << rec.cell_x
         << "," << rec.cell_y << ")\n";
    }
  }
}

}  // namespace leosim
