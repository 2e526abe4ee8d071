#include "voi/serialize.hpp"

#include <cstdio>

namespace voi {

namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.size();
  const auto cols = rows == 0 ? 0 : j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) {
      throw std::invalid_argument("ragged matrix in JSON input");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          j[r][c].get<double>();
    }
  }
  return m;
}

}  // namespace

std::string format_number(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

std::string prior_id(const EigenPrior& prior) {
  std::uint64_t hash = spectrum_hash(prior.eigenvalues);
  hash ^= spectrum_hash(prior.mean) * 0x9E3779B97F4A7C15ULL;
  Eigen::VectorXd flat(prior.eigenvectors.size());
  Eigen::Index idx = 0;
  for (Eigen::Index c = 0; c < prior.eigenvectors.cols(); ++c) {
    for (Eigen::Index r = 0; r < prior.eigenvectors.rows(); ++r) {
      flat[idx++] = prior.eigenvectors(r, c);
    }
  }
  hash ^= spectrum_hash(flat) + 0x632BE59BD9B4E019ULL;
  char buffer[20];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(hash));
  return buffer;
}

nlohmann::json to_json(const EigenPrior& prior) {
  return json{{"K", prior.dim()},
              {"mean", vector_to_json(prior.mean)},
              {"eigenvalues", vector_to_json(prior.eigenvalues)},
              {"eigenvectors", matrix_to_json(prior.eigenvectors)}};
}

EigenPrior prior_from_json(const nlohmann::json& j) {
  const int K = j.at("K").get<int>();
  EigenPrior prior = make_prior(vector_from_json(j.at("mean")),
                                vector_from_json(j.at("eigenvalues")),
                                matrix_from_json(j.at("eigenvectors")));
  if (prior.dim() != K) {
    throw std::invalid_argument("K disagrees with the stored arrays");
  }
  return prior;
}

nlohmann::json to_json(const SampleDesign& design) {
  return json{{"sigma_u2", design.noise_variance},
              {"covariates", matrix_to_json(design.covariates)}};
}

SampleDesign design_from_json(const nlohmann::json& j) {
  Eigen::MatrixXd covariates = matrix_from_json(j.at("covariates"));
  return make_design(std::move(covariates), j.at("sigma_u2").get<double>());
}

nlohmann::json to_json(const DesignAllocation& allocation) {
  return json{{"rank", allocation.rank},
              {"delta", vector_to_json(allocation.delta)},
              {"n", allocation.budget},
              {"pi_star", allocation.optimal_value},
              {"water_level", allocation.water_level}};
}

nlohmann::json to_json(const PosteriorSummary& summary) {
  return json{{"posterior_variance", matrix_to_json(summary.posterior_variance)},
              {"trace", summary.trace},
              {"per_direction", vector_to_json(summary.per_direction)},
              {"value", summary.value}};
}

std::string posterior_csv_header() {
  return "prior_id,n,sigma_u2,value,trace";
}

std::string posterior_csv_row(const std::string& prior_id, double n,
                              double noise_variance,
                              const PosteriorSummary& summary) {
  return prior_id + "," + format_number(n) + "," +
         format_number(noise_variance) + "," + format_number(summary.value) +
         "," + format_number(summary.trace);
}

nlohmann::json to_json(const ValueReport& report) {
  json depths = json::array();
  for (const auto& [depth, value] : report.per_depth) {
    depths.push_back(json{{"J", depth},
                          {"rank", value.rank},
                          {"pi", value.sample_value},
                          {"Pi", value.knowledge_value}});
  }
  return json{{"tau", report.tau},
              {"pi_star", report.pi_star},
              {"pi_naive", report.pi_naive},
              {"Pi", report.knowledge_value},
              {"per_depth", std::move(depths)}};
}

std::string value_report_csv_header() {
  return "tau,J,rank,pi,Pi,pi_star,pi_naive";
}

std::string value_report_csv(const ValueReport& report) {
  std::string out;
  for (const auto& [depth, value] : report.per_depth) {
    out += format_number(report.tau) + "," + std::to_string(depth) + "," +
           std::to_string(value.rank) + "," +
           format_number(value.sample_value) + "," +
           format_number(value.knowledge_value) + "," +
           format_number(report.pi_star) + "," +
           format_number(report.pi_naive) + "\n";
  }
  return out;
}

nlohmann::json to_json(const SimulationResult& result) {
  return json{{"empirical_mean_loss", result.empirical_mean_loss},
              {"standard_error", result.standard_error},
              {"analytic_loss", result.analytic_loss},
              {"z_score", result.z_score}};
}

}  // namespace voi
