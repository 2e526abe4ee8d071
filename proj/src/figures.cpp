#include "voi/figures.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "voi/knowledge.hpp"
#include "voi/parallel.hpp"
#include "voi/posterior.hpp"
#include "voi/serialize.hpp"

namespace voi {

namespace {

std::string cell_to_string(const Dataset::Cell& cell) {
  if (std::holds_alternative<long long>(cell)) {
    return std::to_string(std::get<long long>(cell));
  }
  if (std::holds_alternative<double>(cell)) {
    return format_number(std::get<double>(cell));
  }
  return std::get<std::string>(cell);
}

}  // namespace

std::string to_csv(const Dataset& dataset) {
  std::string out;
  for (std::size_t c = 0; c < dataset.columns.size(); ++c) {
    if (c > 0) out += ",";
    out += dataset.columns[c];
  }
  out += "\n";
  for (const auto& row : dataset.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += ",";
      out += cell_to_string(row[c]);
    }
    out += "\n";
  }
  return out;
}

nlohmann::json to_json(const Dataset& dataset) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : dataset.rows) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : row) {
      if (std::holds_alternative<long long>(cell)) {
        cells.push_back(std::get<long long>(cell));
      } else if (std::holds_alternative<double>(cell)) {
        cells.push_back(std::get<double>(cell));
      } else {
        cells.push_back(std::get<std::string>(cell));
      }
    }
    rows.push_back(std::move(cells));
  }
  return nlohmann::json{{"schema", kSchemaTag},
                        {"name", dataset.name},
                        {"columns", dataset.columns},
                        {"rows", std::move(rows)}};
}

std::vector<double> linear_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("bad grid");
  std::vector<double> grid;
  const int count = static_cast<int>(std::round((hi - lo) / step));
  for (int i = 0; i <= count; ++i) grid.push_back(lo + i * step);
  return grid;
}

Dataset fig_kl(int k_max, double sigma_m2,
               const std::vector<double>& rho_grid) {
  if (k_max < 2) throw std::invalid_argument("k_max must be at least 2");
  Dataset dataset;
  dataset.name = "fig-kl";
  dataset.columns = {"K", "series", "rho", "d_kl"};

  struct Row {
    int K;
    double d_rw;
    double rho_eq;
    std::vector<double> d_pairwise;
  };
  std::vector<Row> rows(static_cast<std::size_t>(k_max - 1));
  parallel_for(k_max - 1, [&](long long i) {
    const int K = static_cast<int>(i) + 2;
    Row& row = rows[static_cast<std::size_t>(i)];
    row.K = K;
    const double nu2 = 2.0 * sigma_m2 / (K + 1);
    const EigenPrior rw = prior_random_walk(K, nu2);
    row.d_rw = kl_divergence_to_naive(rw);
    row.rho_eq = equivalent_pairwise_correlation(rw);
    for (double rho : rho_grid) {
      row.d_pairwise.push_back(
          kl_divergence_to_naive(prior_pairwise(K, sigma_m2, rho).eigenvalues));
    }
  });

  for (const Row& row : rows) {
    for (std::size_t r = 0; r < rho_grid.size(); ++r) {
      dataset.rows.push_back({static_cast<long long>(row.K),
                              std::string("pairwise"), rho_grid[r],
                              row.d_pairwise[r]});
    }
    dataset.rows.push_back({static_cast<long long>(row.K),
                            std::string("random_walk"), row.rho_eq, row.d_rw});
  }
  return dataset;
}

Dataset fig_deeper(int K, const std::vector<double>& alphas,
                   const std::vector<double>& n_list, double noise_variance) {
  Dataset dataset;
  dataset.name = "fig-deeper";
  dataset.columns = {"alpha", "n", "J", "rank", "Pi"};

  struct Cell {
    int rank;
    double value;
  };
  const long long cells =
      static_cast<long long>(alphas.size()) * n_list.size() * (K + 1);
  std::vector<Cell> grid(static_cast<std::size_t>(cells));

  std::vector<EigenPrior> priors;
  for (double alpha : alphas) priors.push_back(prior_geometric(K, alpha));

  parallel_for(cells, [&](long long index) {
    const int j = static_cast<int>(index % (K + 1));
    const long long outer = index / (K + 1);
    const std::size_t n_index = static_cast<std::size_t>(outer % n_list.size());
    const std::size_t a_index = static_cast<std::size_t>(outer / n_list.size());
    const DepthValue value = jdeep_value(jdeep(priors[a_index], j),
                                         n_list[n_index], noise_variance);
    grid[static_cast<std::size_t>(index)] = {value.rank,
                                             value.knowledge_value};
  });

  long long index = 0;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    for (std::size_t n = 0; n < n_list.size(); ++n) {
      for (int j = 0; j <= K; ++j, ++index) {
        const Cell& cell = grid[static_cast<std::size_t>(index)];
        dataset.rows.push_back({alphas[a], n_list[n],
                                static_cast<long long>(j),
                                static_cast<long long>(cell.rank),
                                cell.value});
      }
    }
  }
  return dataset;
}

Dataset fig_versus(int K, const std::vector<double>& alphas,
                   const std::vector<double>& targets, double noise_variance) {
  Dataset dataset;
  dataset.name = "fig-versus";
  dataset.columns = {"alpha", "pi0", "J", "n_min", "attainable"};

  std::vector<EigenPrior> priors;
  for (double alpha : alphas) {
    priors.push_back(prior_geometric(K, alpha));
    for (double target : targets) {
      if (target >= priors.back().eigenvalue_mean()) {
        throw std::invalid_argument(
            "targets must lie below the eigenvalue mean");
      }
    }
  }

  struct Cell {
    double n_min;
    bool attainable;
  };
  const long long cells =
      static_cast<long long>(alphas.size()) * targets.size() * (K + 1);
  std::vector<Cell> grid(static_cast<std::size_t>(cells));
  parallel_for(cells, [&](long long index) {
    const int j = static_cast<int>(index % (K + 1));
    const long long outer = index / (K + 1);
    const std::size_t t_index = static_cast<std::size_t>(outer % targets.size());
    const std::size_t a_index = static_cast<std::size_t>(outer / targets.size());
    const MinSampleSize size = min_sample_size(jdeep(priors[a_index], j),
                                               noise_variance,
                                               targets[t_index]);
    grid[static_cast<std::size_t>(index)] = {size.n, size.attainable};
  });

  long long index = 0;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    for (std::size_t t = 0; t < targets.size(); ++t) {
      for (int j = 0; j <= K; ++j, ++index) {
        const Cell& cell = grid[static_cast<std::size_t>(index)];
        dataset.rows.push_back({alphas[a], targets[t],
                                static_cast<long long>(j), cell.n_min,
                                static_cast<long long>(cell.attainable ? 1 : 0)});
      }
    }
  }
  return dataset;
}

Dataset fig_singleton(double rho, double sigma_m2, double noise_variance,
                      const std::vector<double>& t_grid) {
  for (double t : t_grid) {
    if (t < -0.5 - 1e-12 || t > 0.5 + 1e-12) {
      throw std::invalid_argument("t must lie in [-1/2, 1/2]");
    }
  }
  const EigenPrior prior = prior_pairwise(2, sigma_m2, rho);

  Dataset dataset;
  dataset.name = "fig-singleton";
  dataset.columns = {"t", "value"};
  std::vector<double> values(t_grid.size());
  parallel_for(static_cast<long long>(t_grid.size()), [&](long long i) {
    const double t = t_grid[static_cast<std::size_t>(i)];
    Eigen::VectorXd w(2);
    w << std::sin(std::numbers::pi * t), std::cos(std::numbers::pi * t);
    w /= w.norm();
    values[static_cast<std::size_t>(i)] =
        singleton_value(prior, w, noise_variance);
  });
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    dataset.rows.push_back({t_grid[i], values[i]});
  }
  return dataset;
}

Dataset sweep_pairwise(int K, const std::vector<double>& rhos,
                       const std::vector<double>& taus, double sigma_m2,
                       double noise_variance) {
  Dataset dataset;
  dataset.name = "sweep";
  dataset.columns = {"K", "rho", "tau", "pi_star", "pi_naive", "Pi"};

  struct Cell {
    double pi_star;
    double pi_naive;
    double value;
  };
  const long long cells = static_cast<long long>(rhos.size()) * taus.size();
  std::vector<Cell> grid(static_cast<std::size_t>(cells));
  parallel_for(cells, [&](long long index) {
    const std::size_t t = static_cast<std::size_t>(index % taus.size());
    const std::size_t r = static_cast<std::size_t>(index / taus.size());
    const EigenPrior prior = prior_pairwise(K, sigma_m2, rhos[r]);
    const double n =
        taus[t] * noise_variance / prior.eigenvalue_mean();
    const ValueReport report = knowledge_value(prior, n, noise_variance);
    grid[static_cast<std::size_t>(index)] = {report.pi_star, report.pi_naive,
                                             report.knowledge_value};
  });

  long long index = 0;
  for (std::size_t r = 0; r < rhos.size(); ++r) {
    for (std::size_t t = 0; t < taus.size(); ++t, ++index) {
      const Cell& cell = grid[static_cast<std::size_t>(index)];
      dataset.rows.push_back({static_cast<long long>(K), rhos[r], taus[t],
                              cell.pi_star, cell.pi_naive, cell.value});
    }
  }
  return dataset;
}

}  // namespace voi
