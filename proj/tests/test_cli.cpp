#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <sys/wait.h>

#include "cli/commands.hpp"
#include "cli/report.hpp"
#include "cli/scenario.hpp"
#include "qoptics/errors.hpp"

using namespace qoptics;
using namespace qoptics::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json scenario(const std::string& name) { return load_scenario_document(fs::path(QOPTICS_SCENARIO_DIR) / name); }

double number(const Table& t, std::size_t row, const std::string& column) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (t.columns[c] == column) return std::get<double>(t.rows.at(row).at(c));
    }
    FAIL("no column " << column);
    return 0.0;
}

std::string text(const Table& t, std::size_t row) { return std::get<std::string>(t.rows.at(row).at(0)); }

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "qoptics_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string(QOPTICS_BINARY) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json custom_doc() {
    return json::parse(R"({
        "version": 1, "kind": "custom-circuit",
        "modes": ["x", "y"],
        "input": [{"occupations": {"x": 1, "y": 1}, "amplitude": 1}],
        "elements": [],
        "patterns": [{"name": "both", "counts": {"x": 1, "y": 1}}]
    })");
}

}  // namespace

TEST_CASE("real expressions") {
    CHECK(parse_real_expression("pi") == std::numbers::pi);
    CHECK(parse_real_expression("-pi/2") == -std::numbers::pi / 2.0);
    CHECK(parse_real_expression("2*pi/3") == doctest::Approx(2.0 * std::numbers::pi / 3.0));
    CHECK(parse_real_expression("0.25") == 0.25);
    CHECK_THROWS_AS(parse_real_expression("tau"), ConfigError);
    CHECK_THROWS_AS(parse_real_expression(""), ConfigError);
}

TEST_CASE("sweep specifications") {
    const auto s = parse_sweep("theta2=0:pi:5");
    CHECK(s.key == "theta2");
    CHECK(s.count == 5);
    const auto pts = s.points();
    REQUIRE(pts.size() == 5);
    CHECK(pts.front() == 0.0);
    CHECK(pts.back() == std::numbers::pi);
    CHECK(pts[2] == doctest::Approx(std::numbers::pi / 2.0));
    CHECK(parse_sweep("g=0.1:0.1:1").points() == std::vector<double>{0.1});
    CHECK_THROWS_AS(parse_sweep("g=0:1"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("g=0:1:0"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("=0:1:2"), ConfigError);
}

TEST_CASE("scenario validation") {
    SUBCASE("every shipped scenario parses") {
        for (const auto& entry : fs::directory_iterator(QOPTICS_SCENARIO_DIR)) {
            CAPTURE(entry.path().string());
            CHECK_NOTHROW(parse_scenario(load_scenario_document(entry.path())));
        }
    }
    SUBCASE("unknown keys are named") {
        auto doc = scenario("twc_default.json");
        doc["thetaz"] = 1;
        try {
            parse_scenario(doc);
            FAIL("accepted an unknown key");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("thetaz") != std::string::npos);
        }
    }
    SUBCASE("version and kind") {
        auto doc = scenario("twc_default.json");
        doc["version"] = 2;
        CHECK_THROWS_AS(parse_scenario(doc), ConfigError);
        doc["version"] = 1;
        doc["kind"] = "laser";
        CHECK_THROWS_AS(parse_scenario(doc), ConfigError);
    }
    SUBCASE("out-of-range values") {
        auto doc = scenario("twc_default.json");
        doc["q"] = 1.5;
        CHECK_THROWS_AS(run_scenario("twc", doc), ConfigError);
        doc = scenario("twc_default.json");
        doc["thetas"] = json::array({0, 1});
        CHECK_THROWS_AS(parse_scenario(doc), ConfigError);
    }
    SUBCASE("command and kind must agree") {
        CHECK_THROWS_AS(run_scenario("afshar", scenario("twc_default.json")), ConfigError);
        CHECK(kind_for_command("custom") == "custom-circuit");
    }
    SUBCASE("sweeps only on listed keys") {
        CHECK(sweep_keys("twc") == std::vector<std::string>{"theta1", "theta2", "theta3", "q"});
        CHECK(sweep_keys("custom-circuit").empty());
        CHECK_THROWS_AS(run_sweep("twc", scenario("twc_default.json"), parse_sweep("n_max=1:2:2")), ConfigError);
        CHECK_THROWS_AS(run_sweep("custom", scenario("eq1_beam_splitter.json"), parse_sweep("q=0:1:2")), ConfigError);
    }
}

TEST_CASE("single photon on a balanced splitter") {
    const auto r = run_scenario("custom", scenario("eq1_beam_splitter.json"));
    const auto& terms = r.table("terms");
    REQUIRE(terms.rows.size() == 2);
    std::map<std::string, Complex> amp;
    for (std::size_t k = 0; k < 2; ++k) {
        amp[text(terms, k)] = {number(terms, k, "amplitude_re"), number(terms, k, "amplitude_im")};
    }
    REQUIRE(amp.size() == 2);
    for (const auto& [term, a] : amp) CHECK(std::abs(std::abs(a) - 1.0 / std::sqrt(2.0)) < 1e-12);
    // Reflection into b picks up the factor i.
    CHECK(std::abs(amp.at("b:1") / amp.at("a:1") - Complex(0.0, 1.0)) < 1e-12);
    const auto& pats = r.table("patterns");
    CHECK(number(pats, 0, "probability") == doctest::Approx(0.5));
    CHECK(number(pats, 1, "probability") == doctest::Approx(0.5));
}

TEST_CASE("custom circuits") {
    SUBCASE("no elements echoes the input") {
        const auto r = run_scenario("custom", custom_doc());
        const auto& terms = r.table("terms");
        REQUIRE(terms.rows.size() == 1);
        CHECK(text(terms, 0) == "x:1 y:1");
        CHECK(number(terms, 0, "amplitude_re") == 1.0);
        CHECK(number(r.table("patterns"), 0, "probability") == 1.0);
    }
    SUBCASE("over-normalized input is refused") {
        auto doc = custom_doc();
        doc["input"][0]["amplitude"] = 1.5;
        CHECK_THROWS_AS(run_scenario("custom", doc), ConfigError);
    }
    SUBCASE("unknown mode in an element") {
        auto doc = custom_doc();
        doc["elements"] = json::parse(R"([{"type": "phase", "mode": "z", "theta": 1}])");
        CHECK_THROWS(run_scenario("custom", doc));
    }
    SUBCASE("pattern probabilities never exceed one in total") {
        auto doc = custom_doc();
        doc["elements"] = json::parse(R"([{"type": "beam_splitter", "in": ["x", "y"], "reflectivity": 0.5}])");
        doc["patterns"] = json::parse(R"([
            {"name": "xx", "counts": {"x": 2, "y": 0}},
            {"name": "yy", "counts": {"x": 0, "y": 2}},
            {"name": "xy", "counts": {"x": 1, "y": 1}}])");
        const auto r = run_scenario("custom", doc);
        const auto& pats = r.table("patterns");
        double sum = 0.0;
        for (std::size_t k = 0; k < pats.rows.size(); ++k) sum += number(pats, k, "probability");
        CHECK(sum <= 1.0 + kProbabilityTolerance);
        // Two photons on a balanced splitter never leave by different ports.
        CHECK(number(pats, 2, "probability") < 1e-15);
    }
}

TEST_CASE("interferometer report") {
    const auto r = run_scenario("twc", scenario("twc_default.json"));
    const auto& pats = r.table("patterns");
    double sum = 0.0;
    for (std::size_t k = 0; k < pats.rows.size(); ++k) {
        CHECK(std::abs(number(pats, k, "residual")) <= 1e-10 * number(pats, k, "closed_form"));
        sum += number(pats, k, "probability");
    }
    CHECK(sum <= 1.0 + kProbabilityTolerance);
    CHECK(r.table("cancelling_pairs").rows.size() == 2);
    CHECK(r.results["entire_amplitude_tags"] == json::array({"via-a", "via-c"}));
}

TEST_CASE("outputs are deterministic") {
    for (const auto& [cmd, file] : {std::pair{"twc", "twc_default.json"}, std::pair{"afshar", "afshar_default.json"},
                                    std::pair{"cqed", "cqed_rabi.json"}, std::pair{"custom", "eq1_beam_splitter.json"}}) {
        CAPTURE(file);
        for (Format f : {Format::Table, Format::Json, Format::Csv}) {
            CHECK(render(run_scenario(cmd, scenario(file)), f) == render(run_scenario(cmd, scenario(file)), f));
        }
    }
    const auto doc = scenario("twc_default.json");
    const auto sw = parse_sweep("theta2=0:pi:9");
    CHECK(render(run_sweep("twc", doc, sw), Format::Csv) == render(run_sweep("twc", doc, sw), Format::Csv));
}

TEST_CASE("afshar CSV holds one row per grid sample") {
    auto doc = scenario("afshar_default.json");
    doc["samples"] = 257;
    const std::string csv = render(run_scenario("afshar", doc), Format::Csv);
    std::istringstream in(csv);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 257 + 1);
}

TEST_CASE("zero coupling gives zero effective coupling and splitting") {
    auto doc = scenario("cqed_rabi.json");
    doc["rabi"]["g"] = 0;
    const auto r = run_scenario("cqed", doc);
    CHECK(r.results["omega_eff"].get<double>() == 0.0);
    CHECK(r.results["exact_splitting"].get<double>() == 0.0);
}

TEST_CASE("number formatting") {
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(parse_format("csv") == Format::Csv);
    CHECK_THROWS_AS(parse_format("xml"), ConfigError);
}

TEST_CASE("binary exit codes and output files") {
    const std::string dir = QOPTICS_SCENARIO_DIR;
    const auto out = scratch("twc.json");
    fs::remove(out);
    CHECK(run_binary("twc " + dir + "/twc_default.json --format json --out " + out.string()) == 0);
    CHECK(fs::exists(out));
    std::ifstream in(out);
    CHECK(json::parse(in).contains("results"));

    const auto bad = scratch("bad.json");
    {
        std::ofstream f(bad);
        f << R"({"version": 1, "kind": "twc", "thetas": [0, 0, 0], "bogus": 1})";
    }
    const auto failed = scratch("failed.csv");
    fs::remove(failed);
    CHECK(run_binary("twc " + bad.string() + " --out " + failed.string()) == 2);
    CHECK_FALSE(fs::exists(failed));
    CHECK_FALSE(fs::exists(failed.string() + ".partial"));

    CHECK(run_binary("afshar " + dir + "/twc_default.json") == 2);
    CHECK(run_binary("twc " + dir + "/missing.json") == 2);
    CHECK(run_binary("twc") == 2);
    CHECK(run_binary("twc " + dir + "/twc_default.json --format xml") == 2);
    CHECK(run_binary("custom " + dir + "/eq1_beam_splitter.json --sweep q=0:1:3") == 2);
    CHECK(run_binary("cqed " + dir + "/cqed_single_channel.json --format csv") == 0);
}
