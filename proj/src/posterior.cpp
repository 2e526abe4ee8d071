#include "voi/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Dense>

namespace voi {

namespace {

constexpr double kConditionLimit = 1e12;

void normalize_column_signs(Eigen::MatrixXd& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (std::abs(m(r, c)) > 1e-12) {
        if (m(r, c) < 0.0) m.col(c) *= -1.0;
        break;
      }
    }
  }
}

PosteriorSummary prior_only_summary(const EigenPrior& prior) {
  PosteriorSummary summary;
  summary.posterior_variance = prior.covariance();
  summary.trace = prior.trace();
  summary.per_direction = prior.eigenvalues;
  summary.value = 0.0;
  return summary;
}

}  // namespace

SampleDesign make_design(Eigen::MatrixXd covariates, double noise_variance) {
  if (!(noise_variance > 0.0)) {
    throw std::invalid_argument("noise variance must be > 0");
  }
  if (covariates.cols() < 2) {
    throw std::invalid_argument("designs need state dimension >= 2");
  }
  for (Eigen::Index i = 0; i < covariates.rows(); ++i) {
    if (std::abs(covariates.row(i).norm() - 1.0) > 1e-10) {
      throw std::invalid_argument("covariates must be unit vectors");
    }
  }
  return SampleDesign{std::move(covariates), noise_variance};
}

int GramSpectrum::rank() const {
  int r = 0;
  for (Eigen::Index k = 0; k < delta.size(); ++k) {
    if (delta[k] > 0.0) r = static_cast<int>(k) + 1;
  }
  return r;
}

GramSpectrum make_gram_spectrum(Eigen::VectorXd delta, Eigen::MatrixXd omega,
                                double source_n) {
  if (delta.size() != omega.cols() || omega.rows() != omega.cols()) {
    throw std::invalid_argument("spectrum dimensions disagree");
  }
  const double floor = delta.size() > 0
                           ? 1e-12 * std::max(1.0, delta.cwiseAbs().maxCoeff())
                           : 0.0;
  for (Eigen::Index k = 0; k < delta.size(); ++k) {
    if (delta[k] < -1e-9) {
      throw std::invalid_argument("Gram eigenvalues must be nonnegative");
    }
    if (delta[k] < floor) delta[k] = 0.0;  // eigensolver noise on the null space
    if (k > 0 && delta[k] > delta[k - 1] + 1e-12) {
      throw std::invalid_argument("Gram eigenvalues must be descending");
    }
  }
  const Eigen::MatrixXd residual =
      omega.transpose() * omega -
      Eigen::MatrixXd::Identity(omega.cols(), omega.cols());
  if (residual.norm() > 1e-10) {
    throw std::invalid_argument("Gram frame is not orthonormal");
  }
  if (std::abs(delta.sum() - source_n) > 1e-9 * std::max(1.0, source_n)) {
    throw std::invalid_argument("Gram trace differs from the budget");
  }
  normalize_column_signs(omega);
  return GramSpectrum{std::move(delta), std::move(omega), source_n};
}

GramSpectrum gram(const SampleDesign& design) {
  const int K = design.dim();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(K, K);
  for (int i = 0; i < design.size(); ++i) {
    g.selfadjointView<Eigen::Lower>().rankUpdate(
        design.covariates.row(i).transpose());
  }
  g = g.selfadjointView<Eigen::Lower>();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("Gram eigendecomposition failed");
  }
  // Solver returns ascending order; flip to descending.
  Eigen::VectorXd delta = solver.eigenvalues().reverse();
  Eigen::MatrixXd omega = solver.eigenvectors().rowwise().reverse();
  return make_gram_spectrum(std::move(delta), std::move(omega),
                            static_cast<double>(design.size()));
}

PosteriorSummary posterior_variance(const EigenPrior& prior,
                                    const SampleDesign& design) {
  if (prior.dim() != design.dim()) {
    throw std::invalid_argument("prior and design dimensions disagree");
  }
  if (design.size() == 0) return prior_only_summary(prior);
  return posterior_variance(prior, gram(design), design.noise_variance);
}

PosteriorSummary posterior_variance(const EigenPrior& prior,
                                    const GramSpectrum& spectrum,
                                    double noise_variance) {
  const int K = prior.dim();
  if (spectrum.dim() != K) {
    throw std::invalid_argument("prior and spectrum dimensions disagree");
  }
  if (!(noise_variance > 0.0)) {
    throw std::invalid_argument("noise variance must be > 0");
  }
  if (spectrum.delta.maxCoeff() == 0.0) return prior_only_summary(prior);

  // Rotate the Gram frame into the prior's eigenbasis: the inner matrix
  //   M = Lambda^{-1} + Z Delta Z^T / sigma_u^2,  Z = V^T Omega,
  // shares its spectrum with Sigma^{-1} + G/sigma_u^2, and the posterior
  // variance is V M^{-1} V^T.
  const Eigen::MatrixXd z = prior.eigenvectors.transpose() * spectrum.omega;
  Eigen::MatrixXd inner =
      z * (spectrum.delta / noise_variance).asDiagonal() * z.transpose();
  inner.diagonal() += prior.eigenvalues.cwiseInverse();
  inner = 0.5 * (inner + inner.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(inner);
  if (solver.info() != Eigen::Success) {
    throw ConditioningError("posterior eigendecomposition failed");
  }
  const Eigen::VectorXd precision = solver.eigenvalues();  // ascending, > 0
  if (!(precision[0] > 0.0) ||
      precision[K - 1] / precision[0] > kConditionLimit) {
    throw ConditioningError(
        "posterior solve exceeds condition number 1e12");
  }

  PosteriorSummary summary;
  const Eigen::MatrixXd basis = prior.eigenvectors * solver.eigenvectors();
  summary.posterior_variance =
      basis * precision.cwiseInverse().asDiagonal() * basis.transpose();
  summary.posterior_variance =
      0.5 * (summary.posterior_variance +
             summary.posterior_variance.transpose()).eval();
  summary.per_direction = precision.cwiseInverse();  // descending
  summary.trace = summary.per_direction.sum();
  summary.value = (prior.trace() - summary.trace) / K;
  return summary;
}

ValueBounds value_bounds(const EigenPrior& prior, const GramSpectrum& spectrum,
                         double noise_variance) {
  const int K = prior.dim();
  if (spectrum.dim() != K) {
    throw std::invalid_argument("prior and spectrum dimensions disagree");
  }
  ValueBounds bounds{0.0, 0.0};
  for (int k = 0; k < K; ++k) {
    const double lam = prior.eigenvalues[k];
    const double aligned = spectrum.delta[k] / noise_variance;
    const double reversed = spectrum.delta[K - 1 - k] / noise_variance;
    bounds.upper += lam - 1.0 / (1.0 / lam + aligned);
    bounds.lower += lam - 1.0 / (1.0 / lam + reversed);
  }
  bounds.upper /= K;
  bounds.lower /= K;
  return bounds;
}

double singleton_value(const EigenPrior& prior, const Eigen::VectorXd& w,
                       double noise_variance) {
  if (w.size() != prior.dim()) {
    throw std::invalid_argument("covariate length differs from K");
  }
  if (std::abs(w.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("covariate must be a unit vector");
  }
  // Work through the spectral coordinates c_k = v_k . w.
  const Eigen::VectorXd c = prior.eigenvectors.transpose() * w;
  double quad = 0.0;       // w' Sigma w
  double quad_sq = 0.0;    // w' Sigma^2 w
  for (int k = 0; k < prior.dim(); ++k) {
    const double weight = c[k] * c[k];
    quad += prior.eigenvalues[k] * weight;
    quad_sq += prior.eigenvalues[k] * prior.eigenvalues[k] * weight;
  }
  return quad_sq / (prior.dim() * (quad + noise_variance));
}

double representative_value(const EigenPrior& prior, double n,
                            double noise_variance) {
  if (n < 0.0) throw std::invalid_argument("n must be nonnegative");
  const int K = prior.dim();
  double total = 0.0;
  for (int k = 0; k < K; ++k) {
    const double lam = prior.eigenvalues[k];
    total += n * lam * lam / (n * lam + K * noise_variance);
  }
  return total / K;
}

NonSpanningDecomposition non_spanning_decomposition(
    const EigenPrior& prior, const SampleDesign& design) {
  const int K = prior.dim();
  if (design.dim() != K) {
    throw std::invalid_argument("prior and design dimensions disagree");
  }
  if (design.size() == 0) {
    throw std::invalid_argument("decomposition needs at least one observation");
  }

  // Each covariate must be a standard basis vector; collect used indices.
  std::set<int> used;
  for (int i = 0; i < design.size(); ++i) {
    int index = -1;
    for (int j = 0; j < K; ++j) {
      const double entry = design.covariates(i, j);
      if (std::abs(entry - 1.0) <= 1e-12) {
        if (index >= 0) index = -2;
        if (index == -1) index = j;
      } else if (std::abs(entry) > 1e-12) {
        index = -2;
      }
    }
    if (index < 0) {
      throw std::invalid_argument(
          "covariates must be standard basis vectors");
    }
    used.insert(index);
  }
  const int rank = *used.rbegin() + 1;
  if (rank >= K) {
    throw std::invalid_argument("design must leave some states unsampled");
  }
  if (static_cast<int>(used.size()) != rank) {
    throw std::invalid_argument(
        "sampled indices must form a leading block 1..R");
  }

  const Eigen::MatrixXd sigma = prior.covariance();
  const Eigen::MatrixXd sigma_ss = sigma.topLeftCorner(rank, rank);
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(sigma_ss);
  if (ldlt.info() != Eigen::Success) {
    throw ConditioningError("on-support covariance solve failed");
  }

  NonSpanningDecomposition split;
  split.rank = rank;
  split.posterior = posterior_variance(prior, design);
  split.regression_maps.resize(K);
  split.conditional_variances.resize(K - rank);

  const Eigen::MatrixXd post_ss =
      split.posterior.posterior_variance.topLeftCorner(rank, rank);
  double sampling = post_ss.trace();
  double extrapolation = 0.0;
  for (int k = 0; k < K; ++k) {
    const Eigen::VectorXd cross = sigma.col(k).head(rank);
    const Eigen::VectorXd xi = ldlt.solve(cross);
    split.regression_maps[k] = xi;
    if (k >= rank) {
      sampling += xi.dot(post_ss * xi);
      const double conditional = sigma(k, k) - xi.dot(cross);
      split.conditional_variances[k - rank] = conditional;
      extrapolation += conditional;
    }
  }
  split.sampling_error = sampling;
  split.extrapolation_error = extrapolation;
  return split;
}

}  // namespace voi
