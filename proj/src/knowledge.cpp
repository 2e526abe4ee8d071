#include "voi/knowledge.hpp"

#include <cmath>
#include <stdexcept>

namespace voi {

namespace {

double clamp_tiny_negative(double value) {
  return (value < 0.0 && value >= -1e-12) ? 0.0 : value;
}

bool spectrum_is_flat(const Eigen::VectorXd& lambda) {
  return lambda[0] - lambda[lambda.size() - 1] <=
         1e-12 * std::max(1.0, lambda.mean());
}

// Pi as a function of tau for a fixed spectrum (sigma_u^2 cancels through
// n = tau * sigma_u^2 / lambda_bar).
double knowledge_value_at_tau(const EigenPrior& prior, double noise_variance,
                              double tau) {
  const double n = tau * noise_variance / prior.eigenvalue_mean();
  return knowledge_value(prior, n, noise_variance).knowledge_value;
}

}  // namespace

double naive_value(int K, double lambda_bar, double tau) {
  if (tau < 0.0) throw std::invalid_argument("tau must be nonnegative");
  if (!(lambda_bar > 0.0)) {
    throw std::invalid_argument("lambda_bar must be > 0");
  }
  return lambda_bar * tau / (K + tau);
}

ValueReport knowledge_value(const EigenPrior& prior, double n,
                            double noise_variance) {
  const int K = prior.dim();
  const double lambda_bar = prior.eigenvalue_mean();

  ValueReport report;
  report.tau = n * lambda_bar / noise_variance;
  report.pi_star = optimal_allocation(prior, n, noise_variance).optimal_value;
  report.pi_naive = naive_value(K, lambda_bar, report.tau);
  report.knowledge_value =
      clamp_tiny_negative(report.pi_star - report.pi_naive);
  return report;
}

ValueReport value_report(const EigenPrior& prior, double n,
                         double noise_variance,
                         const std::vector<int>& depths) {
  ValueReport report = knowledge_value(prior, n, noise_variance);
  std::vector<int> wanted = depths;
  if (wanted.empty()) {
    for (int j = 0; j <= prior.dim(); ++j) wanted.push_back(j);
  }
  for (int j : wanted) {
    report.per_depth[j] = jdeep_value(jdeep(prior, j), n, noise_variance);
  }
  return report;
}

DepthValue jdeep_value(const KnowledgeLadder& ladder, double n,
                       double noise_variance) {
  const int K = ladder.base.dim();
  const double lambda_bar = ladder.base.eigenvalue_mean();
  const Eigen::VectorXd& lambda = ladder.jdeep_eigenvalues;

  DepthValue value;
  value.rank = optimal_rank(lambda, n, noise_variance);

  double inv_sum = 0.0;
  double head_sum = 0.0;
  for (int k = 0; k < value.rank; ++k) {
    inv_sum += 1.0 / lambda[k];
    head_sum += lambda[k];
  }
  value.sample_value =
      (head_sum -
       value.rank * value.rank / (inv_sum + n / noise_variance)) /
      K;
  const double tau = n * lambda_bar / noise_variance;
  value.knowledge_value =
      clamp_tiny_negative(value.sample_value - naive_value(K, lambda_bar, tau));
  return value;
}

RankProfile rank_profile(const EigenPrior& prior, double n,
                         double noise_variance) {
  const int K = prior.dim();
  RankProfile profile;
  profile.ranks.resize(K + 1);
  profile.threshold_depth = 0;
  for (int j = 0; j <= K; ++j) {
    profile.ranks[j] =
        optimal_rank(jdeep(prior, j).jdeep_eigenvalues, n, noise_variance);
    if (profile.ranks[j] == K) profile.threshold_depth = j;
  }
  profile.full_rank = profile.ranks[K];
  return profile;
}

TauThreshold tau_threshold(const EigenPrior& prior, double noise_variance) {
  if (spectrum_is_flat(prior.eigenvalues)) return TauThreshold{0.0, {}};

  const auto derivative = [&](double tau) {
    double h = std::max(1e-4, 1e-4 * tau);
    if (h > tau) h = tau;  // keep the left evaluation at tau >= 0
    const double hi = knowledge_value_at_tau(prior, noise_variance, tau + h);
    const double lo = knowledge_value_at_tau(prior, noise_variance, tau - h);
    return (hi - lo) / (2.0 * h);
  };

  const double tau_max = 1e4 * prior.dim();
  // Geometric scan grid: dense near zero where small thresholds live.
  std::vector<double> grid;
  grid.push_back(1e-12);
  const double lo = 1e-8 * tau_max;
  const int points = 600;
  for (int i = 0; i <= points; ++i) {
    grid.push_back(lo * std::pow(tau_max / lo, static_cast<double>(i) / points));
  }

  TauThreshold result{0.0, {}};
  double prev_tau = grid[0];
  double prev_g = derivative(prev_tau);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double tau = grid[i];
    const double g = derivative(tau);
    if (prev_g > 0.0 && g <= 0.0) {
      double a = prev_tau;
      double b = tau;
      while (b - a > 1e-6) {
        const double mid = 0.5 * (a + b);
        if (derivative(mid) > 0.0) {
          a = mid;
        } else {
          b = mid;
        }
      }
      result.crossings.push_back(0.5 * (a + b));
    }
    prev_tau = tau;
    prev_g = g;
  }

  if (result.crossings.empty()) {
    throw std::runtime_error("no sign change of dPi/dtau up to tau_max");
  }
  result.tau_prime = result.crossings.front();
  return result;
}

double vanishing_check(const EigenPrior& prior, double noise_variance,
                       double tau_probe) {
  if (tau_probe < 1e6) {
    throw std::invalid_argument("tau_probe must be at least 1e6");
  }
  return knowledge_value_at_tau(prior, noise_variance, tau_probe);
}

MinSampleSize min_sample_size(const KnowledgeLadder& ladder,
                              double noise_variance, double target) {
  if (target < 0.0) throw std::invalid_argument("target must be nonnegative");
  if (target == 0.0) return {true, 0.0};

  const double limit = ladder.base.eigenvalue_mean();  // sup over n
  if (target >= limit) return {false, 0.0};

  const auto value_at = [&](double n) {
    return jdeep_value(ladder, n, noise_variance).sample_value;
  };

  double lo = 0.0;
  double hi = 1.0;
  int doublings = 0;
  while (value_at(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 2000) {
      throw std::runtime_error("failed to bracket the target value");
    }
  }
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    const double pi = value_at(mid);
    if (std::abs(pi - target) <= 1e-9) return {true, mid};
    if (pi < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {true, hi};
}

MinSampleSize min_sample_size_integer(const KnowledgeLadder& ladder,
                                      double noise_variance, double target) {
  MinSampleSize continuous = min_sample_size(ladder, noise_variance, target);
  if (continuous.attainable) continuous.n = std::ceil(continuous.n);
  return continuous;
}

}  // namespace voi
