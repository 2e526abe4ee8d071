#pragma once

#include <utility>

#include <Eigen/Core>

#include "voi/posterior.hpp"
#include "voi/prior.hpp"
#include "voi/rng.hpp"

namespace voi {

// Seeded generators for randomized checks. Everything here is deterministic
// given the generator state.

// Log-normal draws sorted descending.
Eigen::VectorXd random_descending_spectrum(SplitMix64& rng, int K);

// QR factor of a Gaussian matrix with the usual sign fix.
Eigen::MatrixXd random_orthogonal(SplitMix64& rng, int K);

EigenPrior random_prior(SplitMix64& rng, int K);

Eigen::VectorXd random_unit_vector(SplitMix64& rng, int K);

SampleDesign random_design(SplitMix64& rng, int K, int n,
                           double noise_variance);

// A (base, spread) pair built by a chain of trace-preserving transfers from
// smaller to larger entries, so the second spectrum spreads the first.
std::pair<Eigen::VectorXd, Eigen::VectorXd> random_mps_pair(SplitMix64& rng,
                                                            int K);

}  // namespace voi
