#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "voi/knowledge.hpp"
#include "voi/random_instances.hpp"
#include "voi/rng.hpp"

using voi::EigenPrior;

namespace {

EigenPrior diagonal_prior(const Eigen::VectorXd& lambda) {
  const int K = static_cast<int>(lambda.size());
  return voi::make_prior(Eigen::VectorXd::Zero(K), lambda,
                         Eigen::MatrixXd::Identity(K, K));
}

double pairwise_tau_prime(int K, double rho) {
  return rho * K / (1.0 + rho * (K - 1));
}

}  // namespace

TEST_CASE("naive value: endpoints and a worked case") {
  CHECK(voi::naive_value(100, 1.0, 0.0) == 0.0);
  CHECK(voi::naive_value(100, 1.0, 100.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(voi::naive_value(10, 2.0, 1e9) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK_THROWS_AS(voi::naive_value(10, 2.0, -1.0), std::invalid_argument);
}

TEST_CASE("knowledge value: flat spectra carry none") {
  const EigenPrior flat = diagonal_prior(Eigen::VectorXd::Constant(5, 1.3));
  for (double n : {0.0, 1.0, 50.0}) {
    CHECK(voi::knowledge_value(flat, n, 1.0).knowledge_value == 0.0);
  }
}

TEST_CASE("knowledge value: two-state worked example") {
  const EigenPrior prior = voi::prior_pairwise(2, 1.0, 0.5);
  const voi::ValueReport report = voi::knowledge_value(prior, 1.0, 1.0);
  CHECK(report.tau == doctest::Approx(1.0));
  CHECK(report.pi_star == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(report.pi_naive == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(report.knowledge_value ==
        doctest::Approx(0.45 - 1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("knowledge value: nonnegative and monotone under spreads") {
  voi::SplitMix64 rng(131, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int K = 2 + static_cast<int>(rng.uniform() * 5);
    const auto [base, spread] = voi::random_mps_pair(rng, K);
    REQUIRE(voi::mps_check(base, spread));
    const double n = rng.uniform() * 10.0;
    const double before =
        voi::knowledge_value(diagonal_prior(base), n, 1.0).knowledge_value;
    const double after =
        voi::knowledge_value(diagonal_prior(spread), n, 1.0).knowledge_value;
    CHECK(before >= 0.0);
    CHECK(after >= before - 1e-11);
  }
}

TEST_CASE("knowledge value: equicorrelated piecewise closed form") {
  for (int K : {2, 5, 20}) {
    for (double rho : {0.1, 0.4, 0.8}) {
      const EigenPrior prior = voi::prior_pairwise(K, 1.0, rho);
      const double tau_switch =
          rho * K / ((1.0 - rho) * (1.0 + rho * (K - 1)));
      for (double share : {0.1, 0.5, 0.9}) {
        const double tau = share * tau_switch;
        const double n = tau;  // lambda_bar = noise = 1
        const double lambda_top = 1.0 + rho * (K - 1);
        const double closed =
            (lambda_top - 1.0 / (1.0 / lambda_top + tau) -
             K * tau / (K + tau)) /
            K;
        CHECK(voi::knowledge_value(prior, n, 1.0).knowledge_value ==
              doctest::Approx(closed).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("depth values: endpoints collapse to the naive and full cases") {
  Eigen::VectorXd lambda(3);
  lambda << 5.0, 3.0, 2.0;
  const EigenPrior prior = diagonal_prior(lambda);
  const double n = 0.7;

  const voi::DepthValue shallow = voi::jdeep_value(voi::jdeep(prior, 0), n, 1.0);
  CHECK(shallow.rank == 3);
  CHECK(std::abs(shallow.knowledge_value) <= 1e-12);

  const voi::DepthValue deep = voi::jdeep_value(voi::jdeep(prior, 3), n, 1.0);
  const voi::ValueReport full = voi::knowledge_value(prior, n, 1.0);
  CHECK(deep.sample_value == doctest::Approx(full.pi_star).epsilon(1e-14));
  CHECK(deep.knowledge_value ==
        doctest::Approx(full.knowledge_value).epsilon(1e-14));
}

TEST_CASE("depth values: plateau starts at the full-knowledge rank") {
  const EigenPrior prior = voi::prior_geometric(100, 0.02);
  for (double n : {10.0, 100.0}) {
    const int full_rank = voi::optimal_rank(prior.eigenvalues, n, 1.0);
    const double full_value =
        voi::knowledge_value(prior, n, 1.0).knowledge_value;
    double previous = -1.0;
    for (int j = 0; j <= 100; ++j) {
      const voi::DepthValue value =
          voi::jdeep_value(voi::jdeep(prior, j), n, 1.0);
      CHECK(value.knowledge_value >= previous - 1e-10);
      previous = value.knowledge_value;
      if (j >= full_rank) {
        CHECK(std::abs(value.knowledge_value - full_value) < 1e-10);
      }
    }
  }
}

TEST_CASE("rank profile: flat base uses every direction at every depth") {
  const EigenPrior flat = diagonal_prior(Eigen::VectorXd::Constant(6, 2.0));
  const voi::RankProfile profile = voi::rank_profile(flat, 3.0, 1.0);
  for (int j = 0; j <= 6; ++j) CHECK(profile.ranks[j] == 6);
  CHECK(profile.threshold_depth == 6);
}

TEST_CASE("rank profile: three-state case follows the piecewise law") {
  Eigen::VectorXd lambda(3);
  lambda << 5.0, 3.0, 2.0;
  const EigenPrior prior = diagonal_prior(lambda);
  const voi::RankProfile profile = voi::rank_profile(prior, 0.3, 1.0);
  CHECK(profile.full_rank == 2);
  for (int j = 0; j <= 3; ++j) {
    const int expected = j <= profile.threshold_depth
                             ? 3
                             : (j < profile.full_rank ? j : profile.full_rank);
    CHECK(profile.ranks[j] == expected);
    CHECK(profile.ranks[j] ==
          voi::optimal_rank(voi::jdeep(prior, j).jdeep_eigenvalues, 0.3, 1.0));
  }
}

TEST_CASE("rank profile: threshold depth rises with the sample size") {
  const EigenPrior prior = voi::prior_geometric(100, 0.03);
  int previous = -1;
  for (double n : {5.0, 50.0, 500.0}) {
    const voi::RankProfile profile = voi::rank_profile(prior, n, 1.0);
    CHECK(profile.threshold_depth >= previous);
    previous = profile.threshold_depth;
  }
  CHECK(previous > 0);
}

TEST_CASE("tau threshold: flat spectra peak at zero") {
  const EigenPrior flat = diagonal_prior(Eigen::VectorXd::Constant(4, 1.0));
  CHECK(voi::tau_threshold(flat, 1.0).tau_prime == 0.0);
}

TEST_CASE("tau threshold: equicorrelated closed form") {
  for (int K : {2, 5, 20}) {
    for (double rho : {0.1, 0.5, 0.9}) {
      const EigenPrior prior = voi::prior_pairwise(K, 1.0, rho);
      const voi::TauThreshold threshold = voi::tau_threshold(prior, 1.0);
      CHECK(std::abs(threshold.tau_prime - pairwise_tau_prime(K, rho)) <
            1e-3);
    }
  }
  CHECK(std::abs(voi::tau_threshold(voi::prior_pairwise(2, 1.0, 0.5), 1.0)
                     .tau_prime -
                 2.0 / 3.0) < 1e-3);
}

TEST_CASE("tau threshold: derivative signs split at the peak") {
  for (int K : {2, 5, 20}) {
    for (int r = 1; r <= 9; ++r) {
      const double rho = 0.1 * r;
      const EigenPrior prior = voi::prior_pairwise(K, 1.0, rho);
      const double tau_prime = pairwise_tau_prime(K, rho);
      const auto value_at = [&](double tau) {
        return voi::knowledge_value(prior, tau, 1.0).knowledge_value;
      };
      const double h = 1e-4;
      for (double share : {0.2, 0.5, 0.8}) {
        const double tau = share * tau_prime;
        if (tau <= 3 * h) continue;
        CHECK(value_at(tau + h) - value_at(tau - h) > 0.0);
      }
      for (double factor : {1.5, 4.0, 20.0, 200.0}) {
        const double tau = factor * tau_prime + 3 * h;
        CHECK(value_at(tau + h) - value_at(tau - h) < 0.0);
      }
    }
  }
}

TEST_CASE("vanishing: knowledge value dies off with unlimited data") {
  CHECK(voi::vanishing_check(voi::prior_pairwise(10, 1.0, 0.9), 1.0, 1e6) <
        1e-3);
  CHECK(voi::vanishing_check(voi::prior_geometric(100, 0.02), 1.0, 1e7) <
        1e-3);
  const EigenPrior flat = diagonal_prior(Eigen::VectorXd::Constant(4, 1.0));
  CHECK(voi::vanishing_check(flat, 1.0, 1e8) == 0.0);
}

TEST_CASE("minimum sample size: endpoints") {
  const EigenPrior prior = voi::prior_geometric(20, 0.1);
  const voi::KnowledgeLadder ladder = voi::jdeep(prior, 20);
  CHECK(voi::min_sample_size(ladder, 1.0, 0.0).n == 0.0);
  CHECK_FALSE(voi::min_sample_size(ladder, 1.0, 1.0).attainable);
  CHECK_FALSE(voi::min_sample_size(ladder, 1.0, 1.7).attainable);
}

TEST_CASE("minimum sample size: bisection lands on the target") {
  voi::SplitMix64 rng(137, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const int K = 2 + static_cast<int>(rng.uniform() * 6);
    const EigenPrior prior = voi::random_prior(rng, K);
    const int depth = static_cast<int>(rng.uniform() * (K + 1));
    const voi::KnowledgeLadder ladder = voi::jdeep(prior, depth);
    const double target = (0.1 + 0.8 * rng.uniform()) * prior.eigenvalue_mean();
    const voi::MinSampleSize size = voi::min_sample_size(ladder, 1.0, target);
    REQUIRE(size.attainable);
    CHECK(std::abs(voi::jdeep_value(ladder, size.n, 1.0).sample_value -
                   target) < 1e-8);
  }
}

TEST_CASE("minimum sample size: deeper knowledge never needs more data") {
  const EigenPrior prior = voi::prior_geometric(60, 0.05);
  for (double target : {0.2, 0.5, 0.8}) {
    double previous = 1e300;
    for (int j = 0; j <= 60; ++j) {
      const voi::MinSampleSize size =
          voi::min_sample_size(voi::jdeep(prior, j), 1.0, target);
      REQUIRE(size.attainable);
      CHECK(size.n <= previous + 1e-6);
      previous = size.n;
    }
  }
}

TEST_CASE("minimum sample size: integer mode rounds up") {
  const EigenPrior prior = voi::prior_geometric(20, 0.1);
  const voi::KnowledgeLadder ladder = voi::jdeep(prior, 20);
  const voi::MinSampleSize continuous =
      voi::min_sample_size(ladder, 1.0, 0.4);
  const voi::MinSampleSize integer =
      voi::min_sample_size_integer(ladder, 1.0, 0.4);
  REQUIRE(continuous.attainable);
  CHECK(integer.n == std::ceil(continuous.n));
}

TEST_CASE("value report: per-depth table is consistent with its parts") {
  const EigenPrior prior = voi::prior_geometric(12, 0.15);
  const voi::ValueReport report = voi::value_report(prior, 4.0, 1.0);
  REQUIRE(report.per_depth.size() == 13);
  CHECK(std::abs(report.per_depth.at(0).knowledge_value) <= 1e-12);
  CHECK(report.per_depth.at(12).sample_value ==
        doctest::Approx(report.pi_star).epsilon(1e-14));
  for (const auto& [depth, value] : report.per_depth) {
    const voi::DepthValue direct =
        voi::jdeep_value(voi::jdeep(prior, depth), 4.0, 1.0);
    CHECK(value.rank == direct.rank);
    CHECK(value.sample_value == doctest::Approx(direct.sample_value));
  }
}
