#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace voi {

// Normal prior over a K-vector of states, held in spectral form:
//
//   covariance = V * diag(lambda) * V^T,
//
// where the columns of V are orthonormal "feature" directions and lambda_k
// is the prior variance along the k-th feature. The spectrum is stored in
// descending order and every entry is strictly positive.
struct EigenPrior {
  Eigen::VectorXd mean;          // length K
  Eigen::VectorXd eigenvalues;   // lambda, descending, > 0
  Eigen::MatrixXd eigenvectors;  // V, orthonormal columns

  int dim() const { return static_cast<int>(eigenvalues.size()); }
  double trace() const { return eigenvalues.sum(); }
  double eigenvalue_mean() const { return trace() / dim(); }
  Eigen::MatrixXd covariance() const;
};

// Family of priors indexed by knowledge depth J: the top-J eigenpairs of
// `base` are kept exactly and the tail is flattened to its mean, preserving
// the trace. J = 0 is the flat (naive) spectrum, J = K reproduces `base`.
struct KnowledgeLadder {
  EigenPrior base;
  int depth;                      // J in {0, ..., K}
  Eigen::VectorXd jdeep_eigenvalues;  // lambda^(J), descending
  double tail_mean;               // shared value of entries k > J
};

// Descending positive spectrum together with its running partial sums,
// the representation used by the spread-ordering checks.
struct EigenvalueDistribution {
  Eigen::VectorXd values;  // descending, > 0
  Eigen::VectorXd prefix;  // compensated partial sums; prefix[K-1] = trace

  static EigenvalueDistribution from(const Eigen::VectorXd& descending_values);
  double trace() const { return prefix[prefix.size() - 1]; }
};

// Validating factory. Requires a descending positive spectrum and orthonormal
// eigenvectors (columns); normalizes each column's sign so that its first
// component larger than 1e-12 in magnitude is positive.
EigenPrior make_prior(Eigen::VectorXd mean, Eigen::VectorXd eigenvalues,
                      Eigen::MatrixXd eigenvectors);

// Equicorrelated states: equal variances sigma_m2 on the diagonal and
// correlation rho off the diagonal. The leading feature is the normalized
// ones vector; the remaining columns are a deterministic orthonormal
// completion. rho must lie in [0, 1).
EigenPrior prior_pairwise(int K, double sigma_m2, double rho);

// States following a random walk with increment variance nu2 and known start
// theta0, so that covariance(j, k) = nu2 * min(j+1, k+1). Eigenvalues and
// eigenvectors come from the closed form for the min(j, k) matrix.
EigenPrior prior_random_walk(int K, double nu2, double theta0 = 0.0);

// Geometrically decaying spectrum lambda_k = K*alpha*(1-alpha)^(k-1) /
// (1-(1-alpha)^K), normalized so the eigenvalue mean is exactly 1.
// `basis` defaults to the identity; it must be orthonormal.
EigenPrior prior_geometric(int K, double alpha);
EigenPrior prior_geometric(int K, double alpha, const Eigen::MatrixXd& basis);

// Builds the eigenvector frame from J linearly independent attribute
// vectors: the first J columns span the attribute subspace (Gram-Schmidt in
// the given order) and the rest span its orthogonal complement. `spectrum`
// supplies the descending eigenvalues.
EigenPrior prior_from_attributes(const std::vector<Eigen::VectorXd>& attributes,
                                 const Eigen::VectorXd& spectrum,
                                 const Eigen::VectorXd& mean);

// Flattens the tail of the spectrum below depth J to its mean. 0 <= J <= K.
KnowledgeLadder jdeep(const EigenPrior& prior, int depth);

// KL divergence from the prior to its flat-spectrum counterpart with the
// same trace: -(1/2) * sum_k log(lambda_k / lambda_bar). Zero iff flat.
double kl_divergence_to_naive(const EigenPrior& prior);
double kl_divergence_to_naive(const Eigen::VectorXd& eigenvalues);

// True iff `to` spreads `from` in the partial-sum order: every prefix sum of
// `to` weakly exceeds the matching prefix sum of `from`, with equality at K.
// Throws on dimension mismatch or when the traces differ by more than 1e-9.
bool mps_check(const EigenvalueDistribution& from,
               const EigenvalueDistribution& to);
bool mps_check(const Eigen::VectorXd& from, const Eigen::VectorXd& to);

// Correlation rho_eq at which the equicorrelated prior (same K, same
// eigenvalue mean) carries the same divergence from flatness as `prior`.
// Solved by bisection on [0, 1-1e-9] to absolute tolerance 1e-6.
double equivalent_pairwise_correlation(const EigenPrior& prior);

// FNV-1a over the raw spectrum bytes; used to pair allocations with the
// prior they were computed from.
std::uint64_t spectrum_hash(const Eigen::VectorXd& eigenvalues);

// Orthonormal completion: extends `columns` (orthonormal K x J) to a full
// K x K orthonormal matrix, drawing candidates from the standard basis in
// index order.
Eigen::MatrixXd complete_orthonormal(const Eigen::MatrixXd& columns);

}  // namespace voi
