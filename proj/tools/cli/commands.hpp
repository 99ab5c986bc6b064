#pragma once

#include <string>

#include <json.hpp>

#include "report.hpp"
#include "scenario.hpp"

namespace qoptics::cli {

/// Probabilities above 1 by more than this are reported as an engine error.
inline constexpr double kProbabilityTolerance = 1e-10;

RunReport cmd_twc(const TwcScenario& s);
RunReport cmd_afshar(const AfsharScenario& s);
RunReport cmd_cqed(const CqedScenario& s);
RunReport cmd_custom(const CustomScenario& s);

/// Validates `doc` against the kind implied by `command` and runs it.
RunReport run_scenario(const std::string& command, const nlohmann::json& doc);

/// Runs the scenario once per sweep point, in parallel, and tabulates each
/// point's summary values in sweep order.
RunReport run_sweep(const std::string& command, const nlohmann::json& doc, const SweepSpec& sweep);

}  // namespace qoptics::cli
