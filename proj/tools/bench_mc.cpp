// SPDX-License-Identifier: Apache-2.0

// Times the Monte Carlo rate engine with the serial reference path against
// the OpenMP-parallel path on one mid-size grouped population. Both paths
// must agree bit-for-bit; the speedup depends on the available core count.

#include <chrono>
#include <cstdio>

#include "leosim/experiment.hpp"
#include "leosim/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace

int main() {
  using namespace leosim;

  const UpaConfig upa(16, 16);
  const int g = 2;
  const double gamma = upa.count();
  const double kappa = 10.0;
  const int n_users = g * g * upa.count();

  std::mt19937_64 rng = substream(42, 0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<UserChannelStats> stats;
  stats.reserve(n_users);
  for (int i = 0; i < n_users; ++i) {
    const double tx = unit(rng);
    const double ty = unit(rng);
    stats.emplace_back(SpaceAngles(tx, ty), gamma, kappa);
  }

  const GroupAssignment assignment = saug_assign(stats, upa, g, g);
  const LinkBudget budget(Eigen::VectorXd::Constant(n_users, 10.0), 10.0);

  McOptions serial{2000, 42, ExecPolicy::Serial};
  McOptions parallel{2000, 42, ExecPolicy::Parallel};

#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp: disabled\n");
#endif

  for (Strategy s : {Strategy::ScsiAslnr, Strategy::IcsiSlnr}) {
    const char* name = s == Strategy::ScsiAslnr ? "sCSI-ASLNR" : "iCSI-SLNR";

    auto t0 = std::chrono::steady_clock::now();
    const RateEstimate rs = ergodic_sum_rate_mc(
        stats, assignment, budget, s, LinkDirection::Downlink, serial);
    const double ts = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const RateEstimate rp = ergodic_sum_rate_mc(
        stats, assignment, budget, s, LinkDirection::Downlink, parallel);
    const double tp = seconds_since(t0);

    const bool same = rs.rate == rp.rate && rs.std_error == rp.std_error;
    std::printf(
        "%-11s serial %8.3f s  parallel %8.3f s  speedup %5.2fx  "
        "bit-identical %s  rate %.6f\n",
        name, ts, tp, ts / tp, same ? "yes" : "NO", rp.rate);
    if (!same) return 1;
  }
  return 0;
}
