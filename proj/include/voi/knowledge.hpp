#pragma once

#include <map>
#include <vector>

#include <Eigen/Core>

#include "voi/design.hpp"
#include "voi/prior.hpp"

namespace voi {

// Value of an optimal sample collected at knowledge depth J.
struct DepthValue {
  int rank;                // R^(J)
  double sample_value;     // pi^(J)
  double knowledge_value;  // Pi^(J) = pi^(J) - pi^(0)
};

// Headline quantities for one (prior, n, sigma_u^2) instance, optionally
// expanded over a set of knowledge depths.
struct ValueReport {
  double tau;              // n * lambda_bar / sigma_u^2
  double pi_star;          // value under full knowledge
  double pi_naive;         // value under the flat spectrum
  double knowledge_value;  // Pi = pi_star - pi_naive
  std::map<int, DepthValue> per_depth;
};

struct RankProfile {
  std::vector<int> ranks;  // R^(J) for J = 0..K
  int threshold_depth;     // J': largest J with R^(J) = K
  int full_rank;           // R* of the base spectrum
};

struct TauThreshold {
  double tau_prime;               // first detected peak of Pi(tau)
  std::vector<double> crossings;  // every sign change found by the scan
};

struct MinSampleSize {
  bool attainable;
  double n;  // meaningful only when attainable
};

// Value of an optimal sample under a flat spectrum with mean lambda_bar:
// lambda_bar * tau / (K + tau).
double naive_value(int K, double lambda_bar, double tau);

// Pi = pi* - pi^(0); zero for flat spectra. Values inside [-1e-12, 0) are
// clamped to zero; anything more negative is reported as-is.
ValueReport knowledge_value(const EigenPrior& prior, double n,
                            double noise_variance);

// Full report including per-depth values for every J in `depths`
// (all depths 0..K when the list is empty).
ValueReport value_report(const EigenPrior& prior, double n,
                         double noise_variance,
                         const std::vector<int>& depths = {});

// Rank and values at one knowledge depth.
DepthValue jdeep_value(const KnowledgeLadder& ladder, double n,
                       double noise_variance);

// R^(J) for every depth plus the threshold depth below which the agent
// samples every direction.
RankProfile rank_profile(const EigenPrior& prior, double n,
                         double noise_variance);

// Data-precision threshold tau' below which Pi(tau) increases: located by a
// sign-change scan of the centered difference dPi/dtau (step max(1e-4,
// 1e-4*tau)) over tau in [0, 1e4*K], then bisection to 1e-6. Returns 0 for
// flat spectra; throws when the scan finds no sign change.
TauThreshold tau_threshold(const EigenPrior& prior, double noise_variance);

// Pi evaluated at a large precision probe (tau_probe >= 1e6).
double vanishing_check(const EigenPrior& prior, double noise_variance,
                       double tau_probe);

// Least n with pi^(J)(n) >= target, by bisection on the increasing value
// curve; unattainable when the target is not below the n -> infinity limit
// lambda_bar.
MinSampleSize min_sample_size(const KnowledgeLadder& ladder,
                              double noise_variance, double target);

// Same, rounded up to whole observations.
MinSampleSize min_sample_size_integer(const KnowledgeLadder& ladder,
                                      double noise_variance, double target);

}  // namespace voi
