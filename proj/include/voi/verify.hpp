#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace voi {

struct CaseResult {
  std::string name;
  bool passed;
  std::string detail;  // inputs and observed values, enough to replay
};

struct SuiteReport {
  std::string suite;
  std::vector<CaseResult> cases;
  double seconds = 0.0;

  bool passed() const;
  int failures() const;
};

nlohmann::json to_json(const SuiteReport& report);

// Randomized suites take a seed so failures replay exactly.
SuiteReport verify_bounds(std::uint64_t seed, int instances = 500);
SuiteReport verify_waterfill(std::uint64_t seed);
SuiteReport verify_mc(std::uint64_t seed, long long draws = 100000);
SuiteReport verify_mps(std::uint64_t seed);
SuiteReport verify_thresholds();

// Deterministic closed-form checks.
SuiteReport verify_equivalent_correlation();
SuiteReport verify_tau_pairwise();
SuiteReport verify_vanishing();
SuiteReport verify_deeper_laws();
SuiteReport verify_min_sample_laws();
SuiteReport verify_nonspanning_limit();

// Every suite above, in acceptance order.
std::vector<SuiteReport> run_all_suites(std::uint64_t seed, long long draws);

}  // namespace voi
