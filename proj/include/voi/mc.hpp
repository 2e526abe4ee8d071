#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "voi/posterior.hpp"
#include "voi/prior.hpp"

namespace voi {

// One Monte-Carlo verification run: draw states and outcomes from the
// generative model, act on the posterior mean, and compare the realized
// mean loss against the closed-form posterior trace.
struct SimulationConfig {
  std::uint64_t seed;
  long long draws;  // >= 1
  EigenPrior prior;
  SampleDesign design;
};

struct SimulationResult {
  double empirical_mean_loss;
  double standard_error;
  double analytic_loss;  // trace(posterior variance) / K
  double z_score;        // (empirical - analytic) / standard_error
};

// Draw i consumes substream i of the seed, so the result is identical for
// any thread count. The plain variant runs the draws under OpenMP; the
// _serial variant is the reference loop kept for testing and benchmarks.
SimulationResult simulate_loss(const SimulationConfig& config);
SimulationResult simulate_loss_serial(const SimulationConfig& config);

struct BruteForceResult {
  double best_value;
  Eigen::VectorXd best_delta;
};

// Exhaustive search over descending grid allocations of n across the
// prior's feature directions (K <= 4). Values use the aligned-design
// closed form, so this is an independent check on the water-filling
// solution. grid_step must be at most 0.02 * n.
BruteForceResult brute_force_allocation(const EigenPrior& prior, double n,
                                        double noise_variance,
                                        double grid_step);
BruteForceResult brute_force_allocation_serial(const EigenPrior& prior,
                                               double n, double noise_variance,
                                               double grid_step);

// Cross-checks three equivalent spread-order tests on a spectrum pair:
// partial sums, tail sums, and a finite family of convex functions
// (z^2, 1/z, e^z, and 20 seeded random ramps).
struct MpsCrosscheck {
  bool prefix_condition;
  bool tail_condition;
  bool convex_condition;
  bool agree() const {
    return prefix_condition == tail_condition &&
           prefix_condition == convex_condition;
  }
};

MpsCrosscheck lemma_mps_crosscheck(const Eigen::VectorXd& from,
                                   const Eigen::VectorXd& to,
                                   std::uint64_t ramp_seed = 0);

std::vector<MpsCrosscheck> lemma_mps_crosscheck(
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& pairs,
    std::uint64_t ramp_seed = 0);

}  // namespace voi
