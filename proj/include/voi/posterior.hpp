#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "voi/prior.hpp"

namespace voi {

// Thrown when a posterior solve would run past the conditioning guard.
struct ConditioningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A sample design: rows of `covariates` are the unit observation vectors,
// all outcomes share the same noise variance. n = 0 (no rows) is allowed.
struct SampleDesign {
  Eigen::MatrixXd covariates;  // n x K, unit rows
  double noise_variance;       // sigma_u^2 > 0

  int size() const { return static_cast<int>(covariates.rows()); }
  int dim() const { return static_cast<int>(covariates.cols()); }
};

SampleDesign make_design(Eigen::MatrixXd covariates, double noise_variance);

// Spectral form of a design's Gram matrix sum_i w_i w_i^T. `source_n` is the
// observation budget the spectrum came from; it is real-valued so that
// fractional optimal allocations are representable. delta sums to source_n.
struct GramSpectrum {
  Eigen::VectorXd delta;  // descending, >= 0
  Eigen::MatrixXd omega;  // orthonormal columns
  double source_n;

  int dim() const { return static_cast<int>(delta.size()); }
  int rank() const;  // number of strictly positive delta entries
};

GramSpectrum make_gram_spectrum(Eigen::VectorXd delta, Eigen::MatrixXd omega,
                                double source_n);

// Eigendecomposition of the design's Gram matrix, descending spectrum,
// sign-normalized frame.
GramSpectrum gram(const SampleDesign& design);

struct PosteriorSummary {
  Eigen::MatrixXd posterior_variance;    // K x K, symmetric positive definite
  double trace;                          // trace of the posterior variance
  Eigen::VectorXd per_direction;         // descending posterior eigenvalues
  double value;                          // pi = (trace(Sigma) - trace) / K
};

// Posterior variance (Sigma^{-1} + G/sigma_u^2)^{-1}, computed in the
// prior's eigenbasis so Sigma itself is never inverted. Throws
// ConditioningError when the inner solve's condition number exceeds 1e12.
// An empty design returns the prior covariance and value 0.
PosteriorSummary posterior_variance(const EigenPrior& prior,
                                    const SampleDesign& design);
PosteriorSummary posterior_variance(const EigenPrior& prior,
                                    const GramSpectrum& spectrum,
                                    double noise_variance);

struct ValueBounds {
  double lower;
  double upper;
};

// Sharp alignment bounds on a sample's value given only the two spectra:
// the upper bound is attained when the Gram frame matches the prior frame
// in order, the lower bound when it matches in reverse order.
ValueBounds value_bounds(const EigenPrior& prior, const GramSpectrum& spectrum,
                         double noise_variance);

// Value of a one-observation sample: w^T Sigma^2 w / (K (w^T Sigma w +
// sigma_u^2)). Agrees with posterior_variance on the singleton design.
double singleton_value(const EigenPrior& prior, const Eigen::VectorXd& w,
                       double noise_variance);

// Value of a sample whose Gram spectrum is flat (n/K in every direction):
// (1/K) sum_k n lambda_k^2 / (n lambda_k + K sigma_u^2). n may be fractional.
double representative_value(const EigenPrior& prior, double n,
                            double noise_variance);

// Error split for designs whose covariates are pure signals of the first R
// states. Sampling error shrinks with more or cleaner data; extrapolation
// error depends only on the prior's cross-state structure.
struct NonSpanningDecomposition {
  int rank;                                  // R < K
  double sampling_error;
  double extrapolation_error;                // sum_{k>R} Var(theta_k | theta_S)
  std::vector<Eigen::VectorXd> regression_maps;  // xi_k, length R, for k in 1..K
  Eigen::VectorXd conditional_variances;     // Var(theta_k | theta_S), k > R
  PosteriorSummary posterior;
};

// Requires every covariate to be a standard basis vector e_k with the used
// indices forming a leading block {1, ..., R}, R < K.
NonSpanningDecomposition non_spanning_decomposition(const EigenPrior& prior,
                                                    const SampleDesign& design);

}  // namespace voi
