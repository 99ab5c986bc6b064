#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qoptics/afshar.hpp"
#include "qoptics/cqed.hpp"
#include "qoptics/detection.hpp"
#include "qoptics/elements.hpp"

namespace qoptics::cli {

inline constexpr int kScenarioVersion = 1;

struct TwcScenario {
    std::array<double, 3> thetas{0.0, 0.0, 0.0};
    Complex q{0.2, 0.0};
    unsigned n_max = 1;
    /// Pattern analysed by the contribution report.
    std::array<bool, 3> report_pattern{true, true, true};
};

struct AfsharScenario {
    afshar::AfsharConfig config;
};

struct CqedScenario {
    /// Exactly one of the two is set.
    std::optional<cqed::RabiSystem> rabi;
    std::optional<cqed::StateGraph> graph;
    /// List Rabi channels over exchange-symmetric atom states instead of
    /// product states.
    bool symmetric_basis = false;
};

struct InputTerm {
    std::vector<std::pair<std::string, unsigned>> counts;
    Complex amplitude;
};

struct CustomScenario {
    std::vector<std::string> modes;
    FockLimits limits;
    std::vector<InputTerm> input;
    std::vector<Element> elements;
    std::vector<DetectionPattern> patterns;
};

using Scenario = std::variant<TwcScenario, AfsharScenario, CqedScenario, CustomScenario>;

/// Parses a real written as a JSON number or as a string such as "pi",
/// "-pi/2" or "2*pi/3".
double parse_real_expression(const std::string& text);

/// Reads and validates a scenario document. Throws ConfigError naming the
/// offending key on any schema violation.
Scenario parse_scenario(const nlohmann::json& doc);
nlohmann::json load_scenario_document(const std::filesystem::path& path);

/// Kind string expected by each subcommand.
std::string kind_for_command(const std::string& command);

/// Parameters a sweep may vary for the given kind.
std::vector<std::string> sweep_keys(const std::string& kind);
/// Returns a copy of `doc` with sweep parameter `key` set to `value`.
nlohmann::json with_parameter(const nlohmann::json& doc, const std::string& key, double value);

struct SweepSpec {
    std::string key;
    double start = 0.0;
    double stop = 0.0;
    std::size_t count = 0;

    /// Evenly spaced points, both ends included.
    std::vector<double> points() const;
};

/// Parses "key=start:stop:count".
SweepSpec parse_sweep(const std::string& text);

}  // namespace qoptics::cli
