#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "voi/posterior.hpp"
#include "voi/prior.hpp"

namespace voi {

// Solution of the budgeted allocation problem: spend n observations across
// the prior's feature directions so that the posterior variances of the top
// `rank` directions are levelled and the rest stay untouched.
struct DesignAllocation {
  int rank;                     // R*, in {1, ..., K}
  Eigen::VectorXd delta;        // per-direction budget, zero past rank
  double budget;                // n >= 0, real-valued
  double noise_variance;        // sigma_u^2
  double optimal_value;         // pi*
  double water_level;           // common posterior variance for k <= rank
  std::uint64_t prior_spectrum; // hash pairing the allocation with its prior
};

// Largest k with sum_{j<=k} 1/lambda_j + n/sigma_u^2 >= k/lambda_k. The
// comparison carries a relative 1e-12 slack so exact-equality boundaries
// (flat spectra at n = 0, threshold budgets) resolve to the larger rank.
int optimal_rank(const Eigen::VectorXd& eigenvalues, double n,
                 double noise_variance);

// Reverse water-filling allocation and its value.
DesignAllocation optimal_allocation(const EigenPrior& prior, double n,
                                    double noise_variance);

// The Gram spectrum induced by the allocation: delta* in the prior's own
// frame. Throws when the allocation came from a different prior.
GramSpectrum optimal_gram(const EigenPrior& prior,
                          const DesignAllocation& allocation);

// Posterior trace at the optimum; equals trace(Sigma) - K * pi*.
double optimal_trace(const EigenPrior& prior,
                     const DesignAllocation& allocation);

}  // namespace voi
