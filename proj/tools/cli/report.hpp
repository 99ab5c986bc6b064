#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace qoptics::cli {

using Cell = std::variant<std::string, double, long long, bool>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows{};
    /// Long plot-ready tables are left out of the human-readable rendering.
    bool bulk = false;

    void add_row(std::vector<Cell> row);
};

struct RunReport {
    std::string command;
    nlohmann::ordered_json inputs;
    nlohmann::ordered_json metadata;
    nlohmann::ordered_json results;
    std::vector<Table> tables;
    /// Table emitted by the CSV format.
    std::string primary_table;
    /// Scalar outcomes collected per point of a parameter sweep.
    std::vector<std::pair<std::string, double>> summary;

    const Table& table(const std::string& name) const;
};

enum class Format { Table, Json, Csv };

Format parse_format(const std::string& s);

/// Every floating value is printed with 12 significant digits.
std::string format_number(double v);
/// JSON value of `v` rounded to 12 significant digits.
nlohmann::ordered_json json_number(double v);

std::string render(const RunReport& report, Format format);
std::string render_csv(const Table& table);

/// Writes through a sibling temporary file and renames it into place, so a
/// failed run never leaves a partial file at `target`.
void write_file_atomically(const std::filesystem::path& target, const std::string& text);

}  // namespace qoptics::cli
