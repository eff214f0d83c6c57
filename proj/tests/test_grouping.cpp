// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <doctest.h>

#include "leosim/grouping.hpp"
#include "leosim/rng.hpp"

using namespace leosim;

namespace {

std::vector<UserChannelStats> uniform_population(int n, const UpaConfig& cfg,
                                                 std::uint64_t seed) {
  (void)cfg;
  std::mt19937_64 rng = substream(seed, 0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<UserChannelStats> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double tx = unit(rng);
    const double ty = unit(rng);
    out.emplace_back(SpaceAngles(tx, ty), 4.0, 10.0);
  }
  return out;
}

}  // namespace

TEST_CASE("cell index basics") {
  CHECK(cell_index(-1.0, 4, 2) == 0);
  const double delta = 2.0 / (4 * 2);
  CHECK(cell_index(-1.0 + delta / 2, 4, 2) == 0);  // first cell center
  const int c = cell_index(-1.0 + 3.5 * delta, 4, 2);
  CHECK(c == 3);
  CHECK(c % 2 == 1);  // group coordinate a = 1
  CHECK(c / 2 == 1);  // node coordinate b = 1
  CHECK_THROWS_AS(cell_index(1.5, 4, 2), std::invalid_argument);
}

TEST_CASE("cell index dense sweep lands angles in their own interval") {
  const int m = 4;
  const int g = 2;
  const double delta = 2.0 / (m * g);
  for (int i = 0; i < 4000; ++i) {
    const double angle = -1.0 + 2.0 * i / 4000.0;
    const int c = cell_index(angle, m, g);
    const double center = -1.0 + delta / 2 + c * delta;
    CHECK(angle >= center - delta / 2);
    CHECK(angle < center + delta / 2);
  }
}

TEST_CASE("grouping on distinct dft nodes yields one orthogonal group") {
  const UpaConfig cfg(4, 4);
  std::vector<UserChannelStats> stats;
  for (int n = 0; n < 4; ++n) {
    for (int m = 0; m < 4; ++m) {
      stats.emplace_back(SpaceAngles(-1.0 + 0.5 * n, -1.0 + 0.5 * m), 1.0,
                         1.0);
    }
  }
  const GroupAssignment a = saug_assign(stats, cfg, 1, 1);
  CHECK(a.num_slots == 1);
  CHECK(a.groups.size() == 1);
  CHECK(a.groups.begin()->second.size() == 16);
  CHECK(a.resource_share == doctest::Approx(1.0));
  CHECK(epsilon_of(a, stats) < 1e-12);
}

TEST_CASE("same-cell users overflow round robin into later slots") {
  const UpaConfig cfg(4, 4);
  std::vector<UserChannelStats> stats{
      UserChannelStats(SpaceAngles(0.1, 0.1), 1.0, 1.0),
      UserChannelStats(SpaceAngles(0.11, 0.11), 1.0, 1.0),
      UserChannelStats(SpaceAngles(0.12, 0.12), 1.0, 1.0)};
  const GroupAssignment a = saug_assign(stats, cfg, 2, 2);
  REQUIRE(a.records.size() == 3);
  CHECK(a.records[0].slot == 0);
  CHECK(a.records[1].slot == 1);
  CHECK(a.records[2].slot == 2);
  CHECK(a.records[0].g == a.records[1].g);
  CHECK(a.records[0].r == a.records[1].r);
  CHECK(a.num_slots == 3);
  CHECK(a.slot_prefactor() == doctest::Approx(1.0 / (4 * 3)));
}

TEST_CASE("saug invariants on a random population") {
  const UpaConfig cfg(4, 4);
  const int g = 2;
  const std::vector<UserChannelStats> stats =
      uniform_population(g * g * cfg.count(), cfg, 21);
  const GroupAssignment a = saug_assign(stats, cfg, g, g);

  // partition: every UT appears exactly once in the group map
  std::set<int> seen;
  for (const auto& [key, members] : a.groups) {
    CHECK(key.g >= 0);
    CHECK(key.g < g);
    CHECK(key.r >= 0);
    CHECK(key.r < g);
    for (int id : members) CHECK(seen.insert(id).second);
  }
  CHECK(seen.size() == stats.size());

  // cell soundness and per-cell uniqueness per (slot, group)
  std::set<std::array<int, 5>> occupied;
  for (const UtRecord& rec : a.records) {
    CHECK(rec.cell_x == cell_index(rec.angles.theta_x, cfg.m_x, g));
    CHECK(rec.cell_y == cell_index(rec.angles.theta_y, cfg.m_y, g));
    CHECK(rec.g == rec.cell_x % g);
    CHECK(rec.r == rec.cell_y % g);
    const std::array<int, 5> key{rec.slot, rec.g, rec.r, rec.cell_x / g,
                                 rec.cell_y / g};
    CHECK(occupied.insert(key).second);
  }

  // determinism
  const GroupAssignment b = saug_assign(stats, cfg, g, g);
  REQUIRE(b.records.size() == a.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].slot == b.records[i].slot);
    CHECK(a.records[i].cell_x == b.records[i].cell_x);
  }

  CHECK(epsilon_of(a, stats) <= analytic_epsilon_bound(cfg, g, g) + 1e-12);
}

TEST_CASE("analytic epsilon bound closed form and brute-force oracle") {
  const UpaConfig cfg16(16, 16);
  CHECK(analytic_epsilon_bound(cfg16, 1, 1) == doctest::Approx(1.0));
  CHECK(analytic_epsilon_bound(cfg16, 4, 4) ==
        doctest::Approx(0.30119287754094975).epsilon(1e-12));

  // monotone decreasing in the group count
  double prev = 1.0;
  for (int g : {2, 4, 8, 16, 64}) {
    const double bound = analytic_epsilon_bound(cfg16, g, g);
    CHECK(bound < prev);
    prev = bound;
  }

  // per-axis factor dominates a dense search over admissible offsets:
  // distinct coarse cells put the offset at least one grid step minus one
  // fine cell width away from zero (mod the grid)
  const int m = 16;
  const int g = 4;
  const double fine = 2.0 / (m * g);
  const double step = 2.0 / m;
  double brute = 0.0;
  for (int node = 1; node <= m - 1; ++node) {
    for (int i = 0; i <= 2000; ++i) {
      const double phi = node * step - fine + 2.0 * fine * i / 2000.0;
      const double s = std::sin(std::numbers::pi * phi / 2.0);
      const double kernel =
          s == 0.0 ? 1.0
                   : std::abs(std::sin(std::numbers::pi * phi * m / 2.0) /
                              (m * s));
      brute = std::max(brute, kernel);
    }
  }
  const double bound = analytic_epsilon_bound(UpaConfig(m, m), g, g);
  CHECK(brute <= bound + 1e-9);
  CHECK(brute == doctest::Approx(bound).epsilon(1e-6));
}

TEST_CASE("fr4 schedule colors the beam lattice") {
  const UpaConfig cfg(2, 2);
  std::vector<UserChannelStats> stats;
  for (int n = 0; n < 2; ++n) {
    for (int m = 0; m < 2; ++m) {
      stats.emplace_back(SpaceAngles(-1.0 + 1.0 * n, -1.0 + 1.0 * m), 1.0,
                         1.0);
    }
  }
  const GroupAssignment a = fr4_schedule(stats, cfg);
  CHECK(a.resource_share == doctest::Approx(0.25));
  CHECK(a.groups.size() == 4);
  for (const auto& [key, members] : a.groups) {
    CHECK(members.size() == 1);
  }

  // same node twice: second UT deferred to the next slot of its color
  stats.emplace_back(SpaceAngles(-0.9, -0.9), 1.0, 1.0);
  const GroupAssignment b = fr4_schedule(stats, cfg);
  CHECK(b.num_slots == 2);
  CHECK(b.records[4].slot == 1);
  CHECK(b.records[4].g == b.records[0].g);
  CHECK(b.records[4].r == b.records[0].r);
}

TEST_CASE("fr4 same-color beams are two grid steps apart") {
  const UpaConfig cfg(8, 8);
  const std::vector<UserChannelStats> stats =
      uniform_population(4 * cfg.count(), cfg, 22);
  const GroupAssignment a = fr4_schedule(stats, cfg);
  for (const auto& [key, members] : a.groups) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        const UtRecord& ri = a.records[static_cast<std::size_t>(members[i])];
        const UtRecord& rj = a.records[static_cast<std::size_t>(members[j])];
        const int dx = std::abs(ri.cell_x - rj.cell_x);
        const int dy = std::abs(ri.cell_y - rj.cell_y);
        CHECK(dx % 2 == 0);
        CHECK(dy % 2 == 0);
        CHECK(dx + dy >= 2);
      }
    }
  }
}

TEST_CASE("schedule report lists every user") {
  const UpaConfig cfg(4, 4);
  const std::vector<UserChannelStats> stats = uniform_population(9, cfg, 23);
  const GroupAssignment a = saug_assign(stats, cfg, 2, 2);
  std::ostringstream os;
  write_report(os, a);
  const std::string text = os.str();
  std::size_t count = 0;
  std::size_t pos = 0;
  while ((pos = text.find("  ut ", pos)) != std::string::npos) {
    ++count;
    pos += 5;
  }
  CHECK(count == stats.size());
  CHECK(text.find("resource_share 0.25") != std::string::npos);
}
