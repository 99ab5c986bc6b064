#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "qoptics/errors.hpp"

namespace qoptics::cli {

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("row width does not match table '" + name + "'");
    rows.push_back(std::move(row));
}

const Table& RunReport::table(const std::string& name) const {
    for (const auto& t : tables) {
        if (t.name == name) return t;
    }
    throw std::out_of_range("no table named '" + name + "'");
}

Format parse_format(const std::string& s) {
    if (s == "table") return Format::Table;
    if (s == "json") return Format::Json;
    if (s == "csv") return Format::Csv;
    throw ConfigError("unknown output format '" + s + "' (expected table, json or csv)");
}

std::string format_number(double v) {
    if (v == 0.0) return "0";  // folds -0
    return fmt::format("{:.12g}", v);
}

nlohmann::ordered_json json_number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return std::stod(format_number(v));
}

namespace {

std::string cell_text(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) return v;
            else if constexpr (std::is_same_v<T, double>) return format_number(v);
            else if constexpr (std::is_same_v<T, bool>) return v ? "yes" : "no";
            else return std::to_string(v);
        },
        c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
    return std::visit(
        [](const auto& v) -> nlohmann::ordered_json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) return json_number(v);
            else return v;
        },
        c);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

void render_text_table(std::ostringstream& os, const Table& t) {
    std::vector<std::size_t> width(t.columns.size());
    for (std::size_t c = 0; c < t.columns.size(); ++c) width[c] = t.columns[c].size();
    std::vector<std::vector<std::string>> text;
    for (const auto& row : t.rows) {
        auto& line = text.emplace_back();
        for (std::size_t c = 0; c < row.size(); ++c) {
            line.push_back(cell_text(row[c]));
            width[c] = std::max(width[c], line.back().size());
        }
    }
    os << "[" << t.name << "]\n";
    auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            os << (c ? "  " : "") << cells[c] << std::string(width[c] - cells[c].size(), ' ');
        }
        os << '\n';
    };
    emit(t.columns);
    for (const auto& line : text) emit(line);
}

void render_text_json(std::ostringstream& os, const nlohmann::ordered_json& j) {
    for (const auto& [k, v] : j.items()) os << "  " << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
}

}  // namespace

std::string render_csv(const Table& table) {
    std::ostringstream os;
    for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << csv_escape(table.columns[c]);
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << csv_escape(cell_text(row[c]));
        os << '\n';
    }
    return os.str();
}

std::string render(const RunReport& report, Format format) {
    switch (format) {
        case Format::Json: {
            nlohmann::ordered_json j;
            j["command"] = report.command;
            j["inputs"] = report.inputs;
            j["metadata"] = report.metadata;
            j["results"] = report.results;
            auto& tables = j["tables"] = nlohmann::ordered_json::object();
            for (const auto& t : report.tables) {
                auto& rows = tables[t.name] = nlohmann::ordered_json::array();
                for (const auto& row : t.rows) {
                    nlohmann::ordered_json r;
                    for (std::size_t c = 0; c < row.size(); ++c) r[t.columns[c]] = cell_json(row[c]);
                    rows.push_back(std::move(r));
                }
            }
            return j.dump(2) + "\n";
        }
        case Format::Csv:
            return render_csv(report.table(report.primary_table));
        case Format::Table: {
            std::ostringstream os;
            os << report.command << '\n';
            if (!report.results.empty()) {
                os << "results:\n";
                render_text_json(os, report.results);
            }
            for (const auto& t : report.tables) {
                if (t.bulk) {
                    os << "[" << t.name << "] " << t.rows.size() << " rows (use --format csv)\n";
                    continue;
                }
                render_text_table(os, t);
            }
            if (!report.metadata.empty()) {
                os << "engine:\n";
                render_text_json(os, report.metadata);
            }
            return os.str();
        }
    }
    return {};
}

void write_file_atomically(const std::filesystem::path& target, const std::string& text) {
    std::filesystem::path tmp = target;
    tmp += ".partial";
    std::error_code ec;
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
        out << text;
        out.close();
        if (!out) {
            std::filesystem::remove(tmp, ec);
            throw Error("failed writing '" + tmp.string() + "'");
        }
    }
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot move output into place at '" + target.string() + "'");
    }
}

}  // namespace qoptics::cli
