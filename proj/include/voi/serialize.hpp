#pragma once

#include <string>

#include <json.hpp>

#include "voi/design.hpp"
#include "voi/knowledge.hpp"
#include "voi/mc.hpp"
#include "voi/posterior.hpp"
#include "voi/prior.hpp"

namespace voi {

inline constexpr const char* kSchemaTag = "voi-design/1";

// Stable short identifier over the prior's full spectral data.
std::string prior_id(const EigenPrior& prior);

nlohmann::json to_json(const EigenPrior& prior);
EigenPrior prior_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SampleDesign& design);
SampleDesign design_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DesignAllocation& allocation);

nlohmann::json to_json(const PosteriorSummary& summary);

// Flat CSV row for a posterior evaluation; columns match
// posterior_csv_header().
std::string posterior_csv_header();
std::string posterior_csv_row(const std::string& prior_id, double n,
                              double noise_variance,
                              const PosteriorSummary& summary);

nlohmann::json to_json(const ValueReport& report);

// Long form: one row per depth entry, tau repeated per row.
std::string value_report_csv_header();
std::string value_report_csv(const ValueReport& report);

nlohmann::json to_json(const SimulationResult& result);

// Fixed-width decimal formatting used by every CSV emitter, so repeated
// runs are byte-identical.
std::string format_number(double value);

}  // namespace voi
