// Command-line front end: reproduces the library's reference datasets as
// CSV/JSON files and runs the verification suites from declarative configs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "voi/figures.hpp"
#include "voi/parallel.hpp"
#include "voi/serialize.hpp"
#include "voi/verify.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitConfigError = 2;

struct OutputOptions {
  std::string out;     // empty means stdout
  std::string format;  // "csv" or "json"
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file: " + path);
  file << text;
}

void write_dataset(const voi::Dataset& dataset, const OutputOptions& output) {
  if (output.format == "csv") {
    write_text(output.out, voi::to_csv(dataset));
  } else if (output.format == "json") {
    write_text(output.out, voi::to_json(dataset).dump(2) + "\n");
  } else {
    throw std::invalid_argument("format must be csv or json");
  }
}

// Fills options that were not passed on the command line from the config
// file's "parameters" object; explicit flags win.
class ConfigOverlay {
 public:
  explicit ConfigOverlay(const json* parameters) : parameters_(parameters) {}

  template <typename T>
  void fill(const CLI::Option* option, const char* key, T& value) const {
    if (parameters_ == nullptr || option->count() > 0) return;
    if (auto it = parameters_->find(key); it != parameters_->end()) {
      value = it->get<T>();
    }
  }

 private:
  const json* parameters_;
};

int run_verify(const std::string& suite, std::uint64_t seed, long long draws,
               const std::string& out) {
  std::vector<voi::SuiteReport> reports;
  if (suite == "all") {
    reports = voi::run_all_suites(seed, draws);
  } else if (suite == "bounds") {
    reports.push_back(voi::verify_bounds(seed));
  } else if (suite == "waterfill") {
    reports.push_back(voi::verify_waterfill(seed));
  } else if (suite == "mc") {
    reports.push_back(voi::verify_mc(seed, draws));
  } else if (suite == "mps") {
    reports.push_back(voi::verify_mps(seed));
  } else if (suite == "thresholds") {
    reports.push_back(voi::verify_thresholds());
  } else {
    throw std::invalid_argument(
        "suite must be one of bounds|waterfill|mc|mps|thresholds|all");
  }

  json combined = json::array();
  bool all_passed = true;
  for (const auto& report : reports) {
    combined.push_back(voi::to_json(report));
    all_passed = all_passed && report.passed();
    for (const auto& c : report.cases) {
      std::cerr << (c.passed ? "[PASS] " : "[FAIL] ") << report.suite << ": "
                << c.name << " (" << c.detail << ")\n";
    }
  }
  write_text(out, json{{"schema", voi::kSchemaTag},
                       {"passed", all_passed},
                       {"suites", std::move(combined)}}
                      .dump(2) +
                      "\n");
  return all_passed ? kExitOk : kExitVerifyFailure;
}

int run(int argc, char** argv) {
  CLI::App app{
      "Sample-design toolkit for linear-Gaussian decision problems: optimal "
      "allocations, value of structural knowledge, and verification suites."};
  app.require_subcommand(0, 1);
  app.fallthrough(true);

  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON config file; explicit flags override it");

  OutputOptions output{"", "csv"};
  auto* out_opt = app.add_option("--out", output.out,
                                 "output path (stdout when omitted)");
  auto* format_opt =
      app.add_option("--format", output.format, "output format: csv or json");

  // fig-kl
  auto* fig_kl = app.add_subcommand(
      "fig-kl", "divergence-from-flatness curves and equivalent correlations");
  int kl_kmax = 50;
  double kl_sigma_m2 = 1.0;
  auto* kl_kmax_opt = fig_kl->add_option("--kmax", kl_kmax, "largest K");
  auto* kl_sigma_opt =
      fig_kl->add_option("--sigma-m2", kl_sigma_m2, "state variance");

  // fig-deeper
  auto* fig_deeper = app.add_subcommand(
      "fig-deeper", "rank and knowledge value by depth, geometric spectra");
  int deeper_k = 100;
  std::vector<double> deeper_alphas = {0.01, 0.02, 0.03};
  std::vector<double> deeper_n = {10.0, 100.0, 1000.0};
  double deeper_noise = 1.0;
  auto* deeper_k_opt = fig_deeper->add_option("--K", deeper_k, "states");
  auto* deeper_alpha_opt =
      fig_deeper->add_option("--alpha", deeper_alphas, "decay rates");
  auto* deeper_n_opt =
      fig_deeper->add_option("--n", deeper_n, "sample sizes");
  auto* deeper_noise_opt =
      fig_deeper->add_option("--sigma-u2", deeper_noise, "noise variance");

  // fig-versus
  auto* fig_versus = app.add_subcommand(
      "fig-versus", "minimum sample sizes by depth, geometric spectra");
  int versus_k = 100;
  std::vector<double> versus_alphas = {0.01, 0.02, 0.03};
  std::vector<double> versus_targets = {0.25, 0.5, 0.75};
  double versus_noise = 1.0;
  auto* versus_k_opt = fig_versus->add_option("--K", versus_k, "states");
  auto* versus_alpha_opt =
      fig_versus->add_option("--alpha", versus_alphas, "decay rates");
  auto* versus_target_opt =
      fig_versus->add_option("--target", versus_targets, "value targets");
  auto* versus_noise_opt =
      fig_versus->add_option("--sigma-u2", versus_noise, "noise variance");

  // fig-singleton
  auto* fig_singleton = app.add_subcommand(
      "fig-singleton", "value of one rotated observation, two states");
  double singleton_rho = 0.5;
  double singleton_sigma_m2 = 1.0;
  double singleton_noise = 1.0;
  double singleton_step = 0.01;
  auto* singleton_rho_opt =
      fig_singleton->add_option("--rho", singleton_rho, "correlation");
  auto* singleton_sigma_opt = fig_singleton->add_option(
      "--sigma-m2", singleton_sigma_m2, "state variance");
  auto* singleton_noise_opt = fig_singleton->add_option(
      "--sigma-u2", singleton_noise, "noise variance");
  auto* singleton_step_opt =
      fig_singleton->add_option("--t-step", singleton_step, "grid step");

  // sweep
  auto* sweep = app.add_subcommand(
      "sweep", "knowledge-value surface for the equicorrelated family");
  int sweep_k = 10;
  std::vector<double> sweep_rhos = {0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<double> sweep_taus = {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0};
  double sweep_sigma_m2 = 1.0;
  double sweep_noise = 1.0;
  auto* sweep_k_opt = sweep->add_option("--K", sweep_k, "states");
  auto* sweep_rho_opt = sweep->add_option("--rho", sweep_rhos, "correlations");
  auto* sweep_tau_opt = sweep->add_option("--tau", sweep_taus, "precisions");
  auto* sweep_sigma_opt =
      sweep->add_option("--sigma-m2", sweep_sigma_m2, "state variance");
  auto* sweep_noise_opt =
      sweep->add_option("--sigma-u2", sweep_noise, "noise variance");

  // verify
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  std::string verify_suite = "all";
  std::uint64_t verify_seed = 20260809;
  long long verify_draws = 100000;
  auto* verify_suite_opt = verify->add_option(
      "suite", verify_suite, "bounds|waterfill|mc|mps|thresholds|all");
  auto* verify_seed_opt =
      verify->add_option("--seed", verify_seed, "randomization seed");
  auto* verify_draws_opt =
      verify->add_option("--draws", verify_draws, "draws per simulation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

#ifdef _OPENMP
  omp_set_num_threads(voi::thread_budget());
#endif

  try {
    json config;
    const json* parameters = nullptr;
    std::string config_command;
    if (!config_path.empty()) {
      std::ifstream file(config_path);
      if (!file) {
        throw std::invalid_argument("cannot read config: " + config_path);
      }
      config = json::parse(file);
      if (config.contains("parameters")) {
        parameters = &config.at("parameters");
      }
      if (config.contains("command")) {
        config_command = config.at("command").get<std::string>();
      }
      if (out_opt->count() == 0 && config.contains("out")) {
        output.out = config.at("out").get<std::string>();
      }
      if (format_opt->count() == 0 && config.contains("format")) {
        output.format = config.at("format").get<std::string>();
      }
    }
    const ConfigOverlay overlay(parameters);

    const auto selected = [&](const CLI::App* sub, const char* name) {
      return sub->parsed() ||
             (app.get_subcommands().empty() && config_command == name);
    };

    if (output.format != "csv" && output.format != "json") {
      throw std::invalid_argument("format must be csv or json");
    }

    if (selected(fig_kl, "fig-kl")) {
      overlay.fill(kl_kmax_opt, "kmax", kl_kmax);
      overlay.fill(kl_sigma_opt, "sigma_m2", kl_sigma_m2);
      write_dataset(voi::fig_kl(kl_kmax, kl_sigma_m2), output);
      return kExitOk;
    }
    if (selected(fig_deeper, "fig-deeper")) {
      overlay.fill(deeper_k_opt, "K", deeper_k);
      overlay.fill(deeper_alpha_opt, "alpha", deeper_alphas);
      overlay.fill(deeper_n_opt, "n", deeper_n);
      overlay.fill(deeper_noise_opt, "sigma_u2", deeper_noise);
      write_dataset(
          voi::fig_deeper(deeper_k, deeper_alphas, deeper_n, deeper_noise),
          output);
      return kExitOk;
    }
    if (selected(fig_versus, "fig-versus")) {
      overlay.fill(versus_k_opt, "K", versus_k);
      overlay.fill(versus_alpha_opt, "alpha", versus_alphas);
      overlay.fill(versus_target_opt, "target", versus_targets);
      overlay.fill(versus_noise_opt, "sigma_u2", versus_noise);
      write_dataset(voi::fig_versus(versus_k, versus_alphas, versus_targets,
                                    versus_noise),
                    output);
      return kExitOk;
    }
    if (selected(fig_singleton, "fig-singleton")) {
      overlay.fill(singleton_rho_opt, "rho", singleton_rho);
      overlay.fill(singleton_sigma_opt, "sigma_m2", singleton_sigma_m2);
      overlay.fill(singleton_noise_opt, "sigma_u2", singleton_noise);
      overlay.fill(singleton_step_opt, "t_step", singleton_step);
      write_dataset(
          voi::fig_singleton(singleton_rho, singleton_sigma_m2,
                             singleton_noise,
                             voi::linear_grid(-0.5, 0.5, singleton_step)),
          output);
      return kExitOk;
    }
    if (selected(sweep, "sweep")) {
      overlay.fill(sweep_k_opt, "K", sweep_k);
      overlay.fill(sweep_rho_opt, "rho", sweep_rhos);
      overlay.fill(sweep_tau_opt, "tau", sweep_taus);
      overlay.fill(sweep_sigma_opt, "sigma_m2", sweep_sigma_m2);
      overlay.fill(sweep_noise_opt, "sigma_u2", sweep_noise);
      write_dataset(voi::sweep_pairwise(sweep_k, sweep_rhos, sweep_taus,
                                        sweep_sigma_m2, sweep_noise),
                    output);
      return kExitOk;
    }
    if (selected(verify, "verify")) {
      overlay.fill(verify_suite_opt, "suite", verify_suite);
      overlay.fill(verify_seed_opt, "seed", verify_seed);
      overlay.fill(verify_draws_opt, "draws", verify_draws);
      return run_verify(verify_suite, verify_seed, verify_draws, output.out);
    }

    std::cerr << app.help();
    return kExitConfigError;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerifyFailure;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
