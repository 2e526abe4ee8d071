#include "voi/prior.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace voi {

namespace {

constexpr double kOrthoTol = 1e-10;

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      comp_ += (sum_ - t) + value;
    } else {
      comp_ += (value - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

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

void check_spectrum(const Eigen::VectorXd& lambda) {
  if (lambda.size() < 2) {
    throw std::invalid_argument("spectrum needs at least two entries");
  }
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (!(lambda[k] > 0.0)) {
      throw std::invalid_argument("eigenvalues must be strictly positive");
    }
    if (k > 0 && lambda[k] > lambda[k - 1]) {
      throw std::invalid_argument("eigenvalues must be descending");
    }
  }
}

void check_orthonormal(const Eigen::MatrixXd& v) {
  const Eigen::MatrixXd residual =
      v.transpose() * v -
      Eigen::MatrixXd::Identity(v.cols(), v.cols());
  if (residual.norm() > kOrthoTol) {
    throw std::invalid_argument("eigenvector frame is not orthonormal");
  }
}

// Two-pass modified Gram-Schmidt of `candidate` against the first `filled`
// columns of q. Returns the residual norm before normalization.
double orthogonalize(const Eigen::MatrixXd& q, Eigen::Index filled,
                     Eigen::VectorXd& candidate) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index j = 0; j < filled; ++j) {
      candidate -= q.col(j).dot(candidate) * q.col(j);
    }
  }
  return candidate.norm();
}

}  // namespace

Eigen::MatrixXd EigenPrior::covariance() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

EigenvalueDistribution EigenvalueDistribution::from(
    const Eigen::VectorXd& descending_values) {
  check_spectrum(descending_values);
  EigenvalueDistribution dist;
  dist.values = descending_values;
  dist.prefix.resize(descending_values.size());
  CompensatedSum sum;
  for (Eigen::Index k = 0; k < descending_values.size(); ++k) {
    sum.add(descending_values[k]);
    dist.prefix[k] = sum.value();
  }
  return dist;
}

EigenPrior make_prior(Eigen::VectorXd mean, Eigen::VectorXd eigenvalues,
                      Eigen::MatrixXd eigenvectors) {
  const auto K = eigenvalues.size();
  if (mean.size() != K || eigenvectors.rows() != K ||
      eigenvectors.cols() != K) {
    throw std::invalid_argument("prior dimensions disagree");
  }
  check_spectrum(eigenvalues);
  check_orthonormal(eigenvectors);
  normalize_column_signs(eigenvectors);

  EigenPrior prior{std::move(mean), std::move(eigenvalues),
                   std::move(eigenvectors)};
  const Eigen::MatrixXd sigma = prior.covariance();
  if ((sigma - sigma.transpose()).norm() > kOrthoTol) {
    throw std::invalid_argument("reconstructed covariance is not symmetric");
  }
  return prior;
}

EigenPrior prior_pairwise(int K, double sigma_m2, double rho) {
  if (K < 2) throw std::invalid_argument("K must be at least 2");
  if (!(sigma_m2 > 0.0)) throw std::invalid_argument("sigma_m2 must be > 0");
  if (rho < 0.0 || rho >= 1.0) {
    throw std::invalid_argument("rho must lie in [0, 1)");
  }

  Eigen::VectorXd lambda(K);
  lambda[0] = sigma_m2 * (1.0 + rho * (K - 1));
  lambda.tail(K - 1).setConstant(sigma_m2 * (1.0 - rho));

  Eigen::MatrixXd leading(K, 1);
  leading.setConstant(1.0 / std::sqrt(static_cast<double>(K)));
  Eigen::MatrixXd v = complete_orthonormal(leading);

  return make_prior(Eigen::VectorXd::Zero(K), std::move(lambda), std::move(v));
}

EigenPrior prior_random_walk(int K, double nu2, double theta0) {
  if (K < 2) throw std::invalid_argument("K must be at least 2");
  if (!(nu2 > 0.0)) throw std::invalid_argument("nu2 must be > 0");

  // Closed-form spectrum of the min(j, k) matrix: the k-th largest
  // eigenvalue is 1 / (4 sin^2((2k-1) pi / (2(2K+1)))) with eigenvector
  // components proportional to sin(j (2k-1) pi / (2K+1)).
  Eigen::VectorXd lambda(K);
  Eigen::MatrixXd v(K, K);
  const double denom = 2.0 * K + 1.0;
  const double scale = 2.0 / std::sqrt(denom);
  for (int k = 1; k <= K; ++k) {
    const double angle = (2.0 * k - 1.0) * std::numbers::pi / (2.0 * denom);
    const double s = std::sin(angle);
    lambda[k - 1] = nu2 / (4.0 * s * s);
    for (int j = 1; j <= K; ++j) {
      v(j - 1, k - 1) =
          scale * std::sin(j * (2.0 * k - 1.0) * std::numbers::pi / denom);
    }
  }
  return make_prior(Eigen::VectorXd::Constant(K, theta0), std::move(lambda),
                    std::move(v));
}

EigenPrior prior_geometric(int K, double alpha) {
  return prior_geometric(K, alpha, Eigen::MatrixXd::Identity(K, K));
}

EigenPrior prior_geometric(int K, double alpha, const Eigen::MatrixXd& basis) {
  if (K < 2) throw std::invalid_argument("K must be at least 2");
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1)");
  }
  // 1 - (1-alpha)^K via expm1/log1p; the direct form cancels badly for
  // alpha near 0.
  const double tail = -std::expm1(static_cast<double>(K) * std::log1p(-alpha));
  Eigen::VectorXd lambda(K);
  for (int k = 0; k < K; ++k) {
    lambda[k] = K * alpha * std::exp(k * std::log1p(-alpha)) / tail;
  }
  return make_prior(Eigen::VectorXd::Zero(K), std::move(lambda), basis);
}

EigenPrior prior_from_attributes(const std::vector<Eigen::VectorXd>& attributes,
                                 const Eigen::VectorXd& spectrum,
                                 const Eigen::VectorXd& mean) {
  const int K = static_cast<int>(spectrum.size());
  const int J = static_cast<int>(attributes.size());
  if (J < 1 || J > K) {
    throw std::invalid_argument("need between 1 and K attribute vectors");
  }
  for (const auto& a : attributes) {
    if (a.size() != K) {
      throw std::invalid_argument("attribute length differs from K");
    }
    if (!(a.norm() > 0.0)) {
      throw std::invalid_argument("attribute vector is zero");
    }
  }

  // Independence check on normalized attributes.
  Eigen::MatrixXd gram(J, J);
  for (int i = 0; i < J; ++i) {
    for (int j = 0; j < J; ++j) {
      gram(i, j) = attributes[i].normalized().dot(attributes[j].normalized());
    }
  }
  if (std::abs(gram.determinant()) <= 1e-12) {
    throw std::invalid_argument("attribute vectors are rank deficient");
  }

  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(K, J);
  for (int j = 0; j < J; ++j) {
    Eigen::VectorXd candidate = attributes[j];
    const double norm = orthogonalize(v, j, candidate);
    if (norm <= 1e-10 * attributes[j].norm()) {
      throw std::invalid_argument("attribute vectors are rank deficient");
    }
    v.col(j) = candidate / norm;
  }
  return make_prior(mean, spectrum, complete_orthonormal(v));
}

KnowledgeLadder jdeep(const EigenPrior& prior, int depth) {
  const int K = prior.dim();
  if (depth < 0 || depth > K) {
    throw std::invalid_argument("depth must lie in {0, ..., K}");
  }

  KnowledgeLadder ladder;
  ladder.base = prior;
  ladder.depth = depth;
  ladder.jdeep_eigenvalues = prior.eigenvalues;
  if (depth == K) {
    ladder.tail_mean = prior.eigenvalues[K - 1];
    return ladder;
  }

  CompensatedSum tail_sum;
  for (int k = depth; k < K; ++k) tail_sum.add(prior.eigenvalues[k]);
  ladder.tail_mean = tail_sum.value() / (K - depth);
  ladder.jdeep_eigenvalues.tail(K - depth).setConstant(ladder.tail_mean);
  return ladder;
}

double kl_divergence_to_naive(const Eigen::VectorXd& eigenvalues) {
  check_spectrum(eigenvalues);
  const double mean = eigenvalues.mean();
  CompensatedSum sum;
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
    sum.add(std::log(eigenvalues[k] / mean));
  }
  const double divergence = -0.5 * sum.value();
  return divergence < 0.0 ? 0.0 : divergence;
}

double kl_divergence_to_naive(const EigenPrior& prior) {
  return kl_divergence_to_naive(prior.eigenvalues);
}

bool mps_check(const EigenvalueDistribution& from,
               const EigenvalueDistribution& to) {
  if (from.values.size() != to.values.size()) {
    throw std::invalid_argument("spectra have different lengths");
  }
  const double trace_gap = std::abs(from.trace() - to.trace());
  if (trace_gap > 1e-9 * std::max(1.0, std::abs(from.trace()))) {
    throw std::invalid_argument("spectra have different traces");
  }
  // Equality at k = K is the trace gate above; the remaining partial sums
  // must weakly dominate, with slack for summation rounding only.
  const double slack = 1e-12 * std::max(1.0, std::abs(from.trace()));
  for (Eigen::Index k = 0; k + 1 < from.values.size(); ++k) {
    if (to.prefix[k] < from.prefix[k] - slack) return false;
  }
  return true;
}

bool mps_check(const Eigen::VectorXd& from, const Eigen::VectorXd& to) {
  return mps_check(EigenvalueDistribution::from(from),
                   EigenvalueDistribution::from(to));
}

double equivalent_pairwise_correlation(const EigenPrior& prior) {
  const int K = prior.dim();
  const double target = kl_divergence_to_naive(prior);

  // Divergence of the equicorrelated spectrum at correlation r; monotone
  // increasing from 0, unbounded as r -> 1.
  const auto pairwise_divergence = [K](double r) {
    return -0.5 * (std::log(1.0 + r * (K - 1)) + (K - 1) * std::log1p(-r));
  };

  double lo = 0.0;
  double hi = 1.0 - 1e-9;
  if (target <= 0.0) return 0.0;
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (pairwise_divergence(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::uint64_t spectrum_hash(const Eigen::VectorXd& eigenvalues) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  const auto mix_byte = [&hash](unsigned char byte) {
    hash ^= byte;
    hash *= 0x100000001b3ULL;
  };
  const auto size = static_cast<std::uint64_t>(eigenvalues.size());
  for (int i = 0; i < 8; ++i) mix_byte((size >> (8 * i)) & 0xff);
  const auto* bytes =
      reinterpret_cast<const unsigned char*>(eigenvalues.data());
  for (Eigen::Index i = 0; i < eigenvalues.size() * 8; ++i) mix_byte(bytes[i]);
  return hash;
}

Eigen::MatrixXd complete_orthonormal(const Eigen::MatrixXd& columns) {
  const Eigen::Index K = columns.rows();
  if (columns.cols() > K) {
    throw std::invalid_argument("more columns than dimensions");
  }
  Eigen::MatrixXd q(K, K);
  q.leftCols(columns.cols()) = columns;
  Eigen::Index filled = columns.cols();
  for (Eigen::Index i = 0; i < K && filled < K; ++i) {
    Eigen::VectorXd candidate = Eigen::VectorXd::Unit(K, i);
    const double norm = orthogonalize(q, filled, candidate);
    if (norm > 1e-6) {
      q.col(filled++) = candidate / norm;
    }
  }
  if (filled < K) {
    throw std::runtime_error("orthonormal completion failed");
  }
  return q;
}

}  // namespace voi
