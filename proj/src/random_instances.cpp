#include "voi/random_instances.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace voi {

Eigen::VectorXd random_descending_spectrum(SplitMix64& rng, int K) {
  Eigen::VectorXd lambda(K);
  for (int k = 0; k < K; ++k) lambda[k] = std::exp(rng.normal());
  std::sort(lambda.data(), lambda.data() + K, std::greater<double>());
  return lambda;
}

Eigen::MatrixXd random_orthogonal(SplitMix64& rng, int K) {
  Eigen::MatrixXd gaussian(K, K);
  for (int r = 0; r < K; ++r) {
    for (int c = 0; c < K; ++c) gaussian(r, c) = rng.normal();
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < K; ++c) {
    if (r(c, c) < 0.0) q.col(c) *= -1.0;
  }
  return q;
}

EigenPrior random_prior(SplitMix64& rng, int K) {
  Eigen::VectorXd mean(K);
  for (int k = 0; k < K; ++k) mean[k] = rng.normal();
  return make_prior(std::move(mean), random_descending_spectrum(rng, K),
                    random_orthogonal(rng, K));
}

Eigen::VectorXd random_unit_vector(SplitMix64& rng, int K) {
  Eigen::VectorXd w(K);
  double norm = 0.0;
  while (norm < 1e-6) {
    for (int k = 0; k < K; ++k) w[k] = rng.normal();
    norm = w.norm();
  }
  return w / norm;
}

SampleDesign random_design(SplitMix64& rng, int K, int n,
                           double noise_variance) {
  Eigen::MatrixXd covariates(n, K);
  for (int i = 0; i < n; ++i) {
    covariates.row(i) = random_unit_vector(rng, K).transpose();
  }
  return make_design(std::move(covariates), noise_variance);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> random_mps_pair(SplitMix64& rng,
                                                            int K) {
  Eigen::VectorXd base = random_descending_spectrum(rng, K);
  Eigen::VectorXd spread = base;
  const int transfers = 1 + static_cast<int>(rng.uniform() * 4);
  for (int t = 0; t < transfers; ++t) {
    int hi = static_cast<int>(rng.uniform() * K);
    int lo = static_cast<int>(rng.uniform() * K);
    if (spread[hi] < spread[lo]) std::swap(hi, lo);
    if (hi == lo) continue;
    // Move mass from the smaller entry toward the larger one; the sorted
    // multiset then spreads in the partial-sum order.
    const double amount = rng.uniform() * 0.9 * spread[lo];
    spread[hi] += amount;
    spread[lo] -= amount;
  }
  std::sort(spread.data(), spread.data() + K, std::greater<double>());
  return {std::move(base), std::move(spread)};
}

}  // namespace voi
