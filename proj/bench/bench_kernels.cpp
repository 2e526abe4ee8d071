// Wall-clock comparison of the OpenMP kernels against their serial
// references. Build and run manually:
//   cmake --build build --target voi_bench && ./build/bench/voi_bench

#include <chrono>
#include <cstdio>

#include "voi/figures.hpp"
#include "voi/mc.hpp"
#include "voi/parallel.hpp"
#include "voi/random_instances.hpp"

namespace {

template <typename Fn>
double time_seconds(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

void report(const char* kernel, double serial, double parallel) {
  std::printf("%-28s serial %8.3fs   parallel %8.3fs   speedup %5.2fx\n",
              kernel, serial, parallel, serial / parallel);
}

}  // namespace

int main() {
  std::printf("thread budget: %d\n", voi::thread_budget());
  voi::SplitMix64 rng(4242, 0);

  {
    const int K = 8;
    const voi::SimulationConfig config{4242, 2000000,
                                       voi::random_prior(rng, K),
                                       voi::random_design(rng, K, 12, 1.0)};
    double checksum_serial = 0.0;
    double checksum_parallel = 0.0;
    const double serial = time_seconds([&] {
      checksum_serial = voi::simulate_loss_serial(config).empirical_mean_loss;
    });
    const double parallel = time_seconds([&] {
      checksum_parallel = voi::simulate_loss(config).empirical_mean_loss;
    });
    report("simulate_loss (2e6 draws)", serial, parallel);
    if (checksum_serial != checksum_parallel) {
      std::printf("MISMATCH: serial and parallel kernels disagree\n");
      return 1;
    }
  }

  {
    const voi::EigenPrior prior = voi::random_prior(rng, 4);
    const double n = 6.0;
    double value_serial = 0.0;
    double value_parallel = 0.0;
    const double serial = time_seconds([&] {
      value_serial =
          voi::brute_force_allocation_serial(prior, n, 1.0, 0.004).best_value;
    });
    const double parallel = time_seconds([&] {
      value_parallel =
          voi::brute_force_allocation(prior, n, 1.0, 0.004).best_value;
    });
    report("brute force (K=4, 1500^3)", serial, parallel);
    if (value_serial != value_parallel) {
      std::printf("MISMATCH: serial and parallel kernels disagree\n");
      return 1;
    }
  }

  {
    double rows_parallel = 0.0;
    const double parallel = time_seconds([&] {
      rows_parallel = static_cast<double>(
          voi::fig_versus(100, {0.01, 0.02, 0.03}, {0.25, 0.5, 0.75}, 1.0)
              .rows.size());
    });
    std::printf("%-28s parallel %8.3fs   (%g rows)\n",
                "fig-versus sweep", parallel, rows_parallel);
  }
  return 0;
}
