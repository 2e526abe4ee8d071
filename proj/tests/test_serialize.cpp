#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "voi/knowledge.hpp"
#include "voi/mc.hpp"
#include "voi/random_instances.hpp"
#include "voi/serialize.hpp"

TEST_CASE("prior JSON round trip") {
  voi::SplitMix64 rng(173, 0);
  const voi::EigenPrior prior = voi::random_prior(rng, 5);
  const nlohmann::json j = voi::to_json(prior);
  CHECK(j.at("K") == 5);
  const voi::EigenPrior back = voi::prior_from_json(j);
  CHECK((back.mean - prior.mean).norm() < 1e-14);
  CHECK((back.eigenvalues - prior.eigenvalues).norm() < 1e-14);
  CHECK((back.eigenvectors - prior.eigenvectors).norm() < 1e-14);
  CHECK(voi::prior_id(back) == voi::prior_id(prior));
}

TEST_CASE("prior JSON rejects corrupted frames") {
  voi::SplitMix64 rng(179, 0);
  nlohmann::json j = voi::to_json(voi::random_prior(rng, 3));
  j["eigenvectors"][0][0] = 2.0;
  CHECK_THROWS_AS(voi::prior_from_json(j), std::invalid_argument);
}

TEST_CASE("design JSON round trip") {
  voi::SplitMix64 rng(181, 0);
  const voi::SampleDesign design = voi::random_design(rng, 4, 3, 0.7);
  const nlohmann::json j = voi::to_json(design);
  CHECK(j.at("sigma_u2") == 0.7);
  const voi::SampleDesign back = voi::design_from_json(j);
  CHECK((back.covariates - design.covariates).norm() < 1e-14);
  CHECK(back.noise_variance == design.noise_variance);
}

TEST_CASE("allocation JSON carries the contract fields") {
  voi::SplitMix64 rng(191, 0);
  const voi::EigenPrior prior = voi::random_prior(rng, 4);
  const voi::DesignAllocation allocation =
      voi::optimal_allocation(prior, 2.5, 1.0);
  const nlohmann::json j = voi::to_json(allocation);
  CHECK(j.at("rank") == allocation.rank);
  CHECK(j.at("n") == 2.5);
  CHECK(j.at("pi_star") == allocation.optimal_value);
  CHECK(j.at("water_level") == allocation.water_level);
  CHECK(j.at("delta").size() == 4);
}

TEST_CASE("posterior CSV row is stable") {
  voi::SplitMix64 rng(193, 0);
  const voi::EigenPrior prior = voi::random_prior(rng, 3);
  const voi::SampleDesign design = voi::random_design(rng, 3, 2, 1.0);
  const voi::PosteriorSummary summary = voi::posterior_variance(prior, design);
  const std::string row =
      voi::posterior_csv_row(voi::prior_id(prior), 2, 1.0, summary);
  CHECK(voi::posterior_csv_header() == "prior_id,n,sigma_u2,value,trace");
  CHECK(row ==
        voi::posterior_csv_row(voi::prior_id(prior), 2, 1.0, summary));
  CHECK(row.find(voi::prior_id(prior)) == 0);
}

TEST_CASE("value report serializes per-depth rows") {
  const voi::EigenPrior prior = voi::prior_geometric(6, 0.2);
  const voi::ValueReport report = voi::value_report(prior, 2.0, 1.0);
  const nlohmann::json j = voi::to_json(report);
  CHECK(j.at("per_depth").size() == 7);
  CHECK(j.at("Pi").get<double>() == report.knowledge_value);

  const std::string csv = voi::value_report_csv(report);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  CHECK(voi::value_report_csv_header() ==
        "tau,J,rank,pi,Pi,pi_star,pi_naive");
}

TEST_CASE("posterior summary and simulation results serialize") {
  voi::SplitMix64 rng(227, 0);
  const voi::EigenPrior prior = voi::random_prior(rng, 3);
  const voi::SampleDesign design = voi::random_design(rng, 3, 2, 1.0);
  const voi::PosteriorSummary summary = voi::posterior_variance(prior, design);
  const nlohmann::json pj = voi::to_json(summary);
  CHECK(pj.at("trace").get<double>() == summary.trace);
  CHECK(pj.at("value").get<double>() == summary.value);
  CHECK(pj.at("per_direction").size() == 3);

  const voi::SimulationResult result =
      voi::simulate_loss({99, 1000, prior, design});
  const nlohmann::json sj = voi::to_json(result);
  CHECK(sj.at("z_score").get<double>() == result.z_score);
  CHECK(sj.at("empirical_mean_loss").get<double>() ==
        result.empirical_mean_loss);
}

TEST_CASE("number formatting is deterministic") {
  CHECK(voi::format_number(0.45) == "0.45");
  CHECK(voi::format_number(1.0 / 3.0) == voi::format_number(1.0 / 3.0));
  CHECK(voi::format_number(1e-10) == "1e-10");
}
