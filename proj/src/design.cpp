#include "voi/design.hpp"

#include <cmath>
#include <stdexcept>

namespace voi {

namespace {

void check_budget(double n, double noise_variance) {
  if (n < 0.0) throw std::invalid_argument("budget must be nonnegative");
  if (!(noise_variance > 0.0)) {
    throw std::invalid_argument("noise variance must be > 0");
  }
}

}  // namespace

int optimal_rank(const Eigen::VectorXd& eigenvalues, double n,
                 double noise_variance) {
  check_budget(n, noise_variance);
  const int K = static_cast<int>(eigenvalues.size());
  const double ratio = n / noise_variance;

  int rank = 1;
  double inv_prefix = 0.0;
  double comp = 0.0;
  for (int k = 0; k < K; ++k) {
    // Kahan-compensated prefix of 1/lambda.
    const double term = 1.0 / eigenvalues[k];
    const double t = inv_prefix + term;
    comp += std::abs(inv_prefix) >= std::abs(term) ? (inv_prefix - t) + term
                                                   : (term - t) + inv_prefix;
    inv_prefix = t;

    const double lhs = inv_prefix + comp + ratio;
    const double rhs = (k + 1) / eigenvalues[k];
    if (lhs >= rhs - 1e-12 * std::max(1.0, rhs)) rank = k + 1;
  }
  return rank;
}

DesignAllocation optimal_allocation(const EigenPrior& prior, double n,
                                    double noise_variance) {
  check_budget(n, noise_variance);
  const int K = prior.dim();
  const Eigen::VectorXd& lambda = prior.eigenvalues;
  const int rank = optimal_rank(lambda, n, noise_variance);

  double inv_sum = 0.0;
  double head_sum = 0.0;
  for (int k = 0; k < rank; ++k) {
    inv_sum += 1.0 / lambda[k];
    head_sum += lambda[k];
  }
  const double avg_inv = inv_sum / rank;
  const double level_denominator = inv_sum + n / noise_variance;

  DesignAllocation allocation;
  allocation.rank = rank;
  allocation.budget = n;
  allocation.noise_variance = noise_variance;
  allocation.water_level = rank / level_denominator;
  allocation.optimal_value =
      (head_sum - rank * rank / level_denominator) / K;
  allocation.prior_spectrum = spectrum_hash(lambda);

  allocation.delta = Eigen::VectorXd::Zero(K);
  const double clamp_tol = 1e-12 * std::max(1.0, n + noise_variance * avg_inv);
  for (int k = 0; k < rank; ++k) {
    double d = n / rank + noise_variance * (avg_inv - 1.0 / lambda[k]);
    if (d < 0.0) {
      if (d < -clamp_tol) {
        throw std::runtime_error("allocation entry fell below zero");
      }
      d = 0.0;
    }
    allocation.delta[k] = d;
  }
  return allocation;
}

GramSpectrum optimal_gram(const EigenPrior& prior,
                          const DesignAllocation& allocation) {
  if (allocation.delta.size() != prior.dim() ||
      allocation.prior_spectrum != spectrum_hash(prior.eigenvalues)) {
    throw std::invalid_argument(
        "allocation was computed from a different prior");
  }
  return make_gram_spectrum(allocation.delta, prior.eigenvectors,
                            allocation.budget);
}

double optimal_trace(const EigenPrior& prior,
                     const DesignAllocation& allocation) {
  if (allocation.delta.size() != prior.dim() ||
      allocation.prior_spectrum != spectrum_hash(prior.eigenvalues)) {
    throw std::invalid_argument(
        "allocation was computed from a different prior");
  }
  const Eigen::VectorXd& lambda = prior.eigenvalues;
  double inv_sum = 0.0;
  for (int k = 0; k < allocation.rank; ++k) inv_sum += 1.0 / lambda[k];
  double trace = allocation.rank * allocation.rank /
                 (inv_sum + allocation.budget / allocation.noise_variance);
  for (int k = allocation.rank; k < prior.dim(); ++k) trace += lambda[k];
  return trace;
}

}  // namespace voi
