#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "voi/prior.hpp"

namespace voi {

// Tabular output of one figure/sweep run. Cells keep their native type so
// the CSV and JSON writers format them consistently.
struct Dataset {
  using Cell = std::variant<long long, double, std::string>;

  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string to_csv(const Dataset& dataset);
nlohmann::json to_json(const Dataset& dataset);

// Divergence-from-flatness curves: for each K, the random-walk prior's
// divergence (trace-matched to sigma_m2) with its equivalent pairwise
// correlation, plus the pairwise divergence over a correlation grid.
// Columns: K, series, rho, d_kl. On "random_walk" rows the rho column holds
// the equivalent correlation.
Dataset fig_kl(int k_max, double sigma_m2,
               const std::vector<double>& rho_grid = {0.1, 0.2, 0.3, 0.4, 0.5,
                                                      0.6, 0.7, 0.8, 0.9});

// Rank and value of knowledge by depth for geometrically decaying spectra.
// Columns: alpha, n, J, rank, Pi.
Dataset fig_deeper(int K, const std::vector<double>& alphas,
                   const std::vector<double>& n_list, double noise_variance);

// Minimum sample sizes by depth. Columns: alpha, pi0, J, n_min, attainable.
Dataset fig_versus(int K, const std::vector<double>& alphas,
                   const std::vector<double>& targets, double noise_variance);

// Value of a single rotated observation against a two-state equicorrelated
// prior. Columns: t, value.
Dataset fig_singleton(double rho, double sigma_m2, double noise_variance,
                      const std::vector<double>& t_grid);

// Knowledge-value surface for the equicorrelated family.
// Columns: K, rho, tau, pi_star, pi_naive, Pi.
Dataset sweep_pairwise(int K, const std::vector<double>& rhos,
                       const std::vector<double>& taus, double sigma_m2,
                       double noise_variance);

std::vector<double> linear_grid(double lo, double hi, double step);

}  // namespace voi
