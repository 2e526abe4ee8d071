#include "voi/mc.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "voi/parallel.hpp"
#include "voi/rng.hpp"

namespace voi {

namespace {

struct DrawContext {
  const SimulationConfig* config;
  Eigen::VectorXd sqrt_lambda;
  Eigen::VectorXd prior_outcome_mean;  // W mu
  Eigen::MatrixXd gain;                // P W^T / sigma_u^2
};

double run_draw(const DrawContext& ctx, long long index) {
  const SimulationConfig& cfg = *ctx.config;
  const int K = cfg.prior.dim();
  const int n = cfg.design.size();
  SplitMix64 rng(cfg.seed, static_cast<std::uint64_t>(index));

  const Eigen::VectorXd theta =
      cfg.prior.mean +
      cfg.prior.eigenvectors *
          ctx.sqrt_lambda.cwiseProduct(rng.normal_vector(K));

  Eigen::VectorXd action = cfg.prior.mean;
  if (n > 0) {
    Eigen::VectorXd outcomes = cfg.design.covariates * theta;
    const double noise_sd = std::sqrt(cfg.design.noise_variance);
    for (int i = 0; i < n; ++i) outcomes[i] += noise_sd * rng.normal();
    action += ctx.gain * (outcomes - ctx.prior_outcome_mean);
  }
  return (action - theta).squaredNorm() / K;
}

template <typename Loop>
SimulationResult simulate_with(const SimulationConfig& config, Loop&& loop) {
  if (config.draws < 1) throw std::invalid_argument("draws must be >= 1");
  if (config.prior.dim() != config.design.dim()) {
    throw std::invalid_argument("prior and design dimensions disagree");
  }

  DrawContext ctx;
  ctx.config = &config;
  ctx.sqrt_lambda = config.prior.eigenvalues.cwiseSqrt();
  const PosteriorSummary posterior =
      posterior_variance(config.prior, config.design);
  if (config.design.size() > 0) {
    ctx.prior_outcome_mean = config.design.covariates * config.prior.mean;
    ctx.gain = posterior.posterior_variance *
               config.design.covariates.transpose() /
               config.design.noise_variance;
  }

  std::vector<double> losses(static_cast<std::size_t>(config.draws));
  loop(config.draws,
       [&](long long i) { losses[static_cast<std::size_t>(i)] = run_draw(ctx, i); });

  // Serial two-pass reduction keeps the aggregate bit-identical for any
  // thread count.
  double mean = 0.0;
  for (double loss : losses) mean += loss;
  mean /= static_cast<double>(config.draws);
  double sq = 0.0;
  for (double loss : losses) sq += (loss - mean) * (loss - mean);

  SimulationResult result;
  result.empirical_mean_loss = mean;
  result.analytic_loss = posterior.trace / config.prior.dim();
  if (config.draws > 1) {
    result.standard_error =
        std::sqrt(sq / (static_cast<double>(config.draws) *
                        (static_cast<double>(config.draws) - 1.0)));
    result.z_score =
        (result.empirical_mean_loss - result.analytic_loss) /
        result.standard_error;
  } else {
    result.standard_error = 0.0;
    result.z_score = 0.0;
  }
  return result;
}

// Descending grid allocations of `total` units into `slots` buckets, each
// bucket at most `cap`; calls visit(counts) for every complete allocation.
void enumerate_descending(int slot, int total, int cap, std::vector<int>& counts,
                          const std::function<void(const std::vector<int>&)>& visit) {
  const int slots = static_cast<int>(counts.size());
  if (slot == slots - 1) {
    if (total <= cap) {
      counts[slot] = total;
      visit(counts);
    }
    return;
  }
  const int remaining_slots = slots - slot;
  // Descending order forces this bucket to carry at least its equal share.
  const int lo = (total + remaining_slots - 1) / remaining_slots;
  for (int c = std::min(cap, total); c >= lo; --c) {
    counts[slot] = c;
    enumerate_descending(slot + 1, total - c, c, counts, visit);
  }
}

double aligned_value(const Eigen::VectorXd& lambda,
                     const std::vector<int>& counts, double step,
                     double noise_variance) {
  double value = 0.0;
  for (int k = 0; k < lambda.size(); ++k) {
    const double delta = counts[k] * step;
    value += lambda[k] - 1.0 / (1.0 / lambda[k] + delta / noise_variance);
  }
  return value / static_cast<double>(lambda.size());
}

template <typename Loop>
BruteForceResult brute_force_with(const EigenPrior& prior, double n,
                                  double noise_variance, double grid_step,
                                  Loop&& loop) {
  const int K = prior.dim();
  if (K > 4) throw std::invalid_argument("grid search supports K <= 4 only");
  if (n < 0.0) throw std::invalid_argument("budget must be nonnegative");
  if (n == 0.0) {
    return BruteForceResult{0.0, Eigen::VectorXd::Zero(K)};
  }
  if (!(grid_step > 0.0) || grid_step > 0.02 * n + 1e-15) {
    throw std::invalid_argument("grid_step must lie in (0, 0.02 * n]");
  }

  const int total = static_cast<int>(std::llround(n / grid_step));
  const double step = n / total;  // so grid allocations sum to n exactly

  // First bucket index ranges over [ceil(total/K), total]; remaining
  // buckets are enumerated per first-bucket value, one slot per candidate,
  // so the scan parallelizes with a deterministic merge.
  const int first_lo = (total + K - 1) / K;
  const int candidates = total - first_lo + 1;
  std::vector<double> best_value(candidates, -1.0);
  std::vector<std::vector<int>> best_counts(candidates);

  loop(candidates, [&](long long slot) {
    const int first = first_lo + static_cast<int>(slot);
    std::vector<int> counts(K, 0);
    counts[0] = first;
    double local_best = -1.0;
    std::vector<int> local_counts;
    const auto visit = [&](const std::vector<int>& allocation) {
      const double value =
          aligned_value(prior.eigenvalues, allocation, step, noise_variance);
      if (value > local_best) {
        local_best = value;
        local_counts = allocation;
      }
    };
    if (K == 1) {
      visit(counts);
    } else {
      enumerate_descending(1, total - first, first, counts, visit);
    }
    best_value[slot] = local_best;
    best_counts[slot] = std::move(local_counts);
  });

  int winner = -1;
  for (int slot = 0; slot < candidates; ++slot) {
    if (best_counts[slot].empty()) continue;
    if (winner < 0 || best_value[slot] > best_value[winner]) winner = slot;
  }
  if (winner < 0) throw std::runtime_error("grid enumeration found nothing");

  BruteForceResult result;
  result.best_value = best_value[winner];
  result.best_delta.resize(K);
  for (int k = 0; k < K; ++k) {
    result.best_delta[k] = best_counts[winner][k] * step;
  }
  return result;
}

}  // namespace

SimulationResult simulate_loss(const SimulationConfig& config) {
  return simulate_with(config, [](long long count, auto&& fn) {
    parallel_for(count, fn);
  });
}

SimulationResult simulate_loss_serial(const SimulationConfig& config) {
  return simulate_with(config, [](long long count, auto&& fn) {
    serial_for(count, fn);
  });
}

BruteForceResult brute_force_allocation(const EigenPrior& prior, double n,
                                        double noise_variance,
                                        double grid_step) {
  return brute_force_with(prior, n, noise_variance, grid_step,
                          [](long long count, auto&& fn) {
                            parallel_for(count, fn);
                          });
}

BruteForceResult brute_force_allocation_serial(const EigenPrior& prior,
                                               double n, double noise_variance,
                                               double grid_step) {
  return brute_force_with(prior, n, noise_variance, grid_step,
                          [](long long count, auto&& fn) {
                            serial_for(count, fn);
                          });
}

MpsCrosscheck lemma_mps_crosscheck(const Eigen::VectorXd& from,
                                   const Eigen::VectorXd& to,
                                   std::uint64_t ramp_seed) {
  const auto from_dist = EigenvalueDistribution::from(from);
  const auto to_dist = EigenvalueDistribution::from(to);
  if (from.size() != to.size()) {
    throw std::invalid_argument("spectra have different lengths");
  }
  const double trace = from_dist.trace();
  if (std::abs(trace - to_dist.trace()) > 1e-9 * std::max(1.0, trace)) {
    throw std::invalid_argument("spectra have different traces");
  }
  const int K = static_cast<int>(from.size());
  const double tol = 1e-9;

  MpsCrosscheck check;
  check.prefix_condition = mps_check(from_dist, to_dist);

  check.tail_condition = true;
  for (int k = 0; k < K; ++k) {
    const double from_tail = trace - (k > 0 ? from_dist.prefix[k - 1] : 0.0);
    const double to_tail = to_dist.trace() - (k > 0 ? to_dist.prefix[k - 1] : 0.0);
    if (to_tail > from_tail + tol * std::max(1.0, std::abs(from_tail))) {
      check.tail_condition = false;
      break;
    }
  }

  std::vector<std::function<double(double)>> family = {
      [](double z) { return z * z; },
      [](double z) { return 1.0 / z; },
      [](double z) { return std::exp(z); },
  };
  SplitMix64 rng(ramp_seed, 0);
  const double top = std::max(from.maxCoeff(), to.maxCoeff());
  for (int i = 0; i < 20; ++i) {
    const double c = rng.uniform() * 1.1 * top;
    family.emplace_back(
        [c](double z) { return std::max(z - c, 0.0); });
  }
  check.convex_condition = true;
  for (const auto& g : family) {
    double sum_from = 0.0;
    double sum_to = 0.0;
    for (int k = 0; k < K; ++k) {
      sum_from += g(from[k]);
      sum_to += g(to[k]);
    }
    if (sum_to < sum_from - tol * std::max(1.0, std::abs(sum_from))) {
      check.convex_condition = false;
      break;
    }
  }
  return check;
}

std::vector<MpsCrosscheck> lemma_mps_crosscheck(
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& pairs,
    std::uint64_t ramp_seed) {
  std::vector<MpsCrosscheck> checks;
  checks.reserve(pairs.size());
  for (const auto& [from, to] : pairs) {
    checks.push_back(lemma_mps_crosscheck(from, to, ramp_seed));
  }
  return checks;
}

}  // namespace voi
