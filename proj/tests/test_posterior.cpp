#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "voi/posterior.hpp"
#include "voi/random_instances.hpp"
#include "voi/rng.hpp"

using voi::EigenPrior;
using voi::SampleDesign;

namespace {

SampleDesign basis_design(int K, const std::vector<int>& indices,
                          double noise_variance) {
  Eigen::MatrixXd covariates =
      Eigen::MatrixXd::Zero(static_cast<int>(indices.size()), K);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    covariates(static_cast<int>(i), indices[i]) = 1.0;
  }
  return voi::make_design(std::move(covariates), noise_variance);
}

// Independent oracle: posterior variance via the dense inverse of
// Sigma^{-1} + G / sigma_u^2.
Eigen::MatrixXd dense_posterior(const EigenPrior& prior,
                                const SampleDesign& design) {
  const Eigen::MatrixXd g =
      design.covariates.transpose() * design.covariates;
  const Eigen::MatrixXd precision =
      prior.covariance().inverse() + g / design.noise_variance;
  return precision.inverse();
}

}  // namespace

TEST_CASE("gram spectrum: singleton, empty, and representative designs") {
  voi::SplitMix64 rng(31, 0);
  {
    Eigen::MatrixXd w(1, 4);
    w.row(0) = voi::random_unit_vector(rng, 4).transpose();
    const voi::GramSpectrum spectrum = voi::gram(voi::make_design(w, 1.0));
    CHECK(spectrum.delta[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(spectrum.delta.tail(3).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(spectrum.rank() == 1);
  }
  {
    const voi::GramSpectrum spectrum =
        voi::gram(voi::make_design(Eigen::MatrixXd(0, 3), 1.0));
    CHECK(spectrum.delta.cwiseAbs().maxCoeff() == 0.0);
    CHECK(spectrum.source_n == 0.0);
  }
  {
    // Two copies of each basis vector: every direction carries n/K = 2.
    const SampleDesign design = basis_design(3, {0, 0, 1, 1, 2, 2}, 1.0);
    const voi::GramSpectrum spectrum = voi::gram(design);
    CHECK((spectrum.delta.array() - 2.0).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("posterior: empty design returns the prior") {
  voi::SplitMix64 rng(37, 0);
  const EigenPrior prior = voi::random_prior(rng, 4);
  const auto summary =
      voi::posterior_variance(prior, voi::make_design(Eigen::MatrixXd(0, 4), 1.0));
  CHECK(summary.value == 0.0);
  CHECK((summary.posterior_variance - prior.covariance()).norm() < 1e-12);
}

TEST_CASE("posterior: two-state leading-feature observation") {
  for (double rho : {0.1, 0.5, 0.8}) {
    const EigenPrior prior = voi::prior_pairwise(2, 1.0, rho);
    Eigen::MatrixXd w(1, 2);
    w << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const auto summary = voi::posterior_variance(prior, voi::make_design(w, 1.0));
    const double expected =
        (1.0 + rho) * (1.0 + rho) / (2.0 * (1.0 + rho + 1.0));
    CHECK(summary.value == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("posterior: matches the dense-inverse oracle") {
  voi::SplitMix64 rng(41, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const EigenPrior prior = voi::random_prior(rng, 4);
    const SampleDesign design =
        voi::random_design(rng, 4, 6, 0.5 + rng.uniform());
    const auto summary = voi::posterior_variance(prior, design);
    const Eigen::MatrixXd oracle = dense_posterior(prior, design);
    CHECK(std::abs(summary.trace - oracle.trace()) < 1e-9);
    CHECK((summary.posterior_variance - oracle).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(summary.value ==
          doctest::Approx((prior.trace() - summary.trace) / 4).epsilon(1e-12));
  }
}

TEST_CASE("posterior: ill-conditioned solves raise instead of proceeding") {
  Eigen::VectorXd lambda(2);
  lambda << 1e13, 1.0;
  const EigenPrior prior = voi::make_prior(
      Eigen::VectorXd::Zero(2), lambda, Eigen::MatrixXd::Identity(2, 2));
  Eigen::MatrixXd w(1, 2);
  w << 0.0, 1.0;  // leaves the huge-variance direction unregularized
  CHECK_THROWS_AS(voi::posterior_variance(prior, voi::make_design(w, 1.0)),
                  voi::ConditioningError);
}

TEST_CASE("designs reject non-unit covariates and bad noise") {
  Eigen::MatrixXd w(1, 2);
  w << 1.0, 1.0;
  CHECK_THROWS_AS(voi::make_design(w, 1.0), std::invalid_argument);
  Eigen::MatrixXd unit(1, 2);
  unit << 1.0, 0.0;
  CHECK_THROWS_AS(voi::make_design(unit, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(voi::make_design(unit, -1.0), std::invalid_argument);
}

TEST_CASE("posterior: output stays symmetric positive definite") {
  voi::SplitMix64 rng(43, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const int K = 2 + static_cast<int>(rng.uniform() * 5);
    const EigenPrior prior = voi::random_prior(rng, K);
    const SampleDesign design = voi::random_design(
        rng, K, static_cast<int>(rng.uniform() * 9), 0.25 + rng.uniform());
    const auto summary = voi::posterior_variance(prior, design);
    CHECK((summary.posterior_variance - summary.posterior_variance.transpose())
              .norm() < 1e-12);
    CHECK(summary.per_direction.minCoeff() > 0.0);
    CHECK(std::abs(summary.trace - summary.posterior_variance.trace()) <
          1e-10);
  }
}

TEST_CASE("posterior: appending observations never lowers the value") {
  voi::SplitMix64 rng(47, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int K = 2 + static_cast<int>(rng.uniform() * 5);
    const double noise = 0.5 + rng.uniform();
    const EigenPrior prior = voi::random_prior(rng, K);
    const int n = static_cast<int>(rng.uniform() * 6);
    const SampleDesign design = voi::random_design(rng, K, n, noise);

    Eigen::MatrixXd extended(n + 1, K);
    extended.topRows(n) = design.covariates;
    extended.row(n) = voi::random_unit_vector(rng, K).transpose();
    const double before = voi::posterior_variance(prior, design).value;
    const double after =
        voi::posterior_variance(prior, voi::make_design(extended, noise)).value;
    CHECK(after >= before - 1e-11);
  }
}

TEST_CASE("posterior: value falls when the noise rises") {
  voi::SplitMix64 rng(53, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int K = 2 + static_cast<int>(rng.uniform() * 5);
    const EigenPrior prior = voi::random_prior(rng, K);
    const int n = 1 + static_cast<int>(rng.uniform() * 6);
    const SampleDesign design = voi::random_design(rng, K, n, 0.5);
    const double quiet = voi::posterior_variance(prior, design).value;
    const double loud =
        voi::posterior_variance(
            prior, voi::make_design(design.covariates, 1.5))
            .value;
    CHECK(loud < quiet);
  }
}

TEST_CASE("bounds: flat Gram spectra collapse the sandwich") {
  voi::SplitMix64 rng(59, 0);
  const EigenPrior prior = voi::random_prior(rng, 5);
  const voi::GramSpectrum spectrum = voi::make_gram_spectrum(
      Eigen::VectorXd::Constant(5, 1.2), voi::random_orthogonal(rng, 5), 6.0);
  const voi::ValueBounds bounds = voi::value_bounds(prior, spectrum, 1.0);
  CHECK(bounds.lower == doctest::Approx(bounds.upper).epsilon(1e-14));
  const double realized = voi::posterior_variance(prior, spectrum, 1.0).value;
  CHECK(realized == doctest::Approx(bounds.upper).epsilon(1e-10));
}

TEST_CASE("bounds: equality at aligned and reversed frames") {
  voi::SplitMix64 rng(61, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const int K = 2 + static_cast<int>(rng.uniform() * 5);
    const double noise = 0.5 + rng.uniform();
    const EigenPrior prior = voi::random_prior(rng, K);
    Eigen::VectorXd delta = voi::random_descending_spectrum(rng, K);
    const voi::GramSpectrum aligned =
        voi::make_gram_spectrum(delta, prior.eigenvectors, delta.sum());
    const voi::GramSpectrum reversed = voi::make_gram_spectrum(
        delta, prior.eigenvectors.rowwise().reverse(), delta.sum());
    const voi::ValueBounds bounds = voi::value_bounds(prior, aligned, noise);
    CHECK(std::abs(voi::posterior_variance(prior, aligned, noise).value -
                   bounds.upper) < 1e-10);
    CHECK(std::abs(voi::posterior_variance(prior, reversed, noise).value -
                   bounds.lower) < 1e-10);
  }
}

TEST_CASE("bounds: sandwich on random designs") {
  voi::SplitMix64 rng(67, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int K = 2 + static_cast<int>(rng.uniform() * 7);
    const double noise = 0.25 + rng.uniform() * 3.0;
    const EigenPrior prior = voi::random_prior(rng, K);
    const SampleDesign design = voi::random_design(
        rng, K, static_cast<int>(rng.uniform() * 13), noise);
    const voi::GramSpectrum spectrum = voi::gram(design);
    const voi::ValueBounds bounds = voi::value_bounds(prior, spectrum, noise);
    const double realized = voi::posterior_variance(prior, design).value;
    CHECK(bounds.lower - 1e-10 <= realized);
    CHECK(realized <= bounds.upper + 1e-10);
  }
}

TEST_CASE("singleton value: eigenvector observations hit the closed forms") {
  voi::SplitMix64 rng(71, 0);
  const EigenPrior prior = voi::random_prior(rng, 5);
  const double noise = 0.8;
  const double top = prior.eigenvalues[0];
  const double bottom = prior.eigenvalues[4];
  CHECK(voi::singleton_value(prior, prior.eigenvectors.col(0), noise) ==
        doctest::Approx(top * top / (5 * (top + noise))).epsilon(1e-12));
  CHECK(voi::singleton_value(prior, prior.eigenvectors.col(4), noise) ==
        doctest::Approx(bottom * bottom / (5 * (bottom + noise)))
            .epsilon(1e-12));
}

TEST_CASE("singleton value: rotated two-state closed form") {
  const double rho = 0.5;
  const EigenPrior prior = voi::prior_pairwise(2, 1.0, rho);
  for (double t : {-0.5, -0.25, 0.0, 0.1, 0.25, 0.5}) {
    Eigen::VectorXd w(2);
    w << std::sin(std::numbers::pi * t), std::cos(std::numbers::pi * t);
    const double s = std::sin(2.0 * std::numbers::pi * t);
    const double expected =
        (1.0 + 2.0 * rho * s + rho * rho) / (2.0 * ((1.0 + rho * s) + 1.0));
    CHECK(voi::singleton_value(prior, w, 1.0) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("singleton value: rank-one update agrees with the dense path") {
  voi::SplitMix64 rng(73, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int K = 2 + static_cast<int>(rng.uniform() * 5);
    const EigenPrior prior = voi::random_prior(rng, K);
    const double noise = 0.25 + rng.uniform();
    const Eigen::VectorXd w = voi::random_unit_vector(rng, K);
    Eigen::MatrixXd covariates(1, K);
    covariates.row(0) = w.transpose();
    const double via_posterior =
        voi::posterior_variance(prior, voi::make_design(covariates, noise))
            .value;
    CHECK(std::abs(voi::singleton_value(prior, w, noise) - via_posterior) <
          1e-11);
  }
}

TEST_CASE("representative value: zero sample and flat identity") {
  voi::SplitMix64 rng(79, 0);
  const EigenPrior prior = voi::random_prior(rng, 4);
  CHECK(voi::representative_value(prior, 0.0, 1.0) == 0.0);

  // Flat spectrum: representative value equals the flat-spectrum optimum
  // lambda_bar * tau / (K + tau).
  for (double lambda_bar : {0.5, 1.0, 2.0}) {
    for (double n : {0.5, 1.0, 4.0, 9.0}) {
      const voi::EigenPrior flat = voi::make_prior(
          Eigen::VectorXd::Zero(4),
          Eigen::VectorXd::Constant(4, lambda_bar),
          Eigen::MatrixXd::Identity(4, 4));
      const double tau = n * lambda_bar / 1.0;
      CHECK(voi::representative_value(flat, n, 1.0) ==
            doctest::Approx(lambda_bar * tau / (4 + tau)).epsilon(1e-12));
    }
  }
}

TEST_CASE("representative value: never falls under a verified spread") {
  voi::SplitMix64 rng(83, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int K = 2 + static_cast<int>(rng.uniform() * 5);
    const auto [base, spread] = voi::random_mps_pair(rng, K);
    REQUIRE(voi::mps_check(base, spread));
    const voi::EigenPrior base_prior =
        voi::make_prior(Eigen::VectorXd::Zero(K), base,
                        Eigen::MatrixXd::Identity(K, K));
    const voi::EigenPrior spread_prior =
        voi::make_prior(Eigen::VectorXd::Zero(K), spread,
                        Eigen::MatrixXd::Identity(K, K));
    const double n = 0.5 + rng.uniform() * 8.0;
    CHECK(voi::representative_value(spread_prior, n, 1.0) >=
          voi::representative_value(base_prior, n, 1.0) - 1e-12);
  }
}

TEST_CASE("non-spanning split: uncorrelated states leave full tail error") {
  const EigenPrior prior = voi::prior_pairwise(6, 1.0, 0.0);
  const auto split =
      voi::non_spanning_decomposition(prior, basis_design(6, {0, 1}, 1.0));
  CHECK(split.rank == 2);
  CHECK(split.extrapolation_error == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("non-spanning split: equicorrelated conditional variance") {
  const EigenPrior prior = voi::prior_pairwise(4, 1.0, 0.5);
  const auto split =
      voi::non_spanning_decomposition(prior, basis_design(4, {0, 1}, 1.0));
  // (1-rho)(1+rho R)/(1+rho(R-1)) with rho=1/2, R=2.
  for (int k = 0; k < 2; ++k) {
    CHECK(split.conditional_variances[k] ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("non-spanning split: additive and invariant to more data") {
  voi::SplitMix64 rng(89, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int K = 3 + static_cast<int>(rng.uniform() * 4);
    const int rank = 1 + static_cast<int>(rng.uniform() * (K - 2));
    const EigenPrior prior = voi::random_prior(rng, K);
    std::vector<int> indices;
    for (int r = 0; r < rank; ++r) indices.push_back(r);
    for (int extra = 0; extra < 3; ++extra) {
      indices.push_back(static_cast<int>(rng.uniform() * rank));
    }
    const auto split = voi::non_spanning_decomposition(
        prior, basis_design(K, indices, 0.5));
    CHECK(std::abs(split.sampling_error + split.extrapolation_error -
                   split.posterior.trace) < 1e-9);

    // Tenfold replication changes only the sampling error.
    std::vector<int> replicated;
    for (int copy = 0; copy < 10; ++copy) {
      replicated.insert(replicated.end(), indices.begin(), indices.end());
    }
    const auto bigger = voi::non_spanning_decomposition(
        prior, basis_design(K, replicated, 0.5));
    CHECK(std::abs(bigger.extrapolation_error - split.extrapolation_error) <
          1e-9);
    CHECK(bigger.sampling_error < split.sampling_error + 1e-12);
  }
}

TEST_CASE("non-spanning split: rejects unsupported designs") {
  const EigenPrior prior = voi::prior_pairwise(4, 1.0, 0.3);
  // Not a basis vector.
  Eigen::MatrixXd rotated(1, 4);
  rotated << 0.5, 0.5, 0.5, 0.5;
  CHECK_THROWS_AS(
      voi::non_spanning_decomposition(prior, voi::make_design(rotated, 1.0)),
      std::invalid_argument);
  // Spanning design.
  CHECK_THROWS_AS(voi::non_spanning_decomposition(
                      prior, basis_design(4, {0, 1, 2, 3}, 1.0)),
                  std::invalid_argument);
  // Hole in the index block.
  CHECK_THROWS_AS(
      voi::non_spanning_decomposition(prior, basis_design(4, {0, 2}, 1.0)),
      std::invalid_argument);
}

TEST_CASE("noise-free non-spanning value approaches the correlation floor") {
  const int K = 200;
  const int rank = 3;
  const double rho = 0.5;
  const EigenPrior prior = voi::prior_pairwise(K, 1.0, rho);
  const auto split = voi::non_spanning_decomposition(
      prior, basis_design(K, {0, 1, 2}, 1e-10));
  const double limit = rho * rho * rank / (1.0 + rho * (rank - 1));
  CHECK(std::abs((1.0 - split.conditional_variances[0]) - limit) < 1e-3);
  const double finite_k =
      1.0 - (1.0 - rho) * (1.0 + rho * rank) * (K - rank) /
                ((1.0 + rho * (rank - 1)) * K);
  CHECK(std::abs(split.posterior.value - finite_k) < 1e-6);
}
