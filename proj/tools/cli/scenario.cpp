#include "scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "qoptics/errors.hpp"

namespace qoptics::cli {

using nlohmann::json;

namespace {

/// Walks one JSON object, remembering which keys were read so leftovers can be
/// reported as unknown.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
        if (!obj_.is_object()) throw ConfigError(where_ + ": expected an object");
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const json& required(const std::string& key) {
        seen_.insert(key);
        if (!obj_.contains(key)) throw ConfigError(where_ + ": missing required key '" + key + "'");
        return obj_.at(key);
    }

    const json* optional(const std::string& key) {
        seen_.insert(key);
        return obj_.contains(key) ? &obj_.at(key) : nullptr;
    }

    std::string path(const std::string& key) const { return where_ + "." + key; }

    void finish() const {
        for (const auto& [k, v] : obj_.items()) {
            if (!seen_.contains(k)) throw ConfigError(where_ + ": unknown key '" + k + "'");
        }
    }

private:
    const json& obj_;
    std::string where_;
    std::set<std::string> seen_;
};

double real_value(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        try {
            return parse_real_expression(v.get<std::string>());
        } catch (const ConfigError& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    throw ConfigError(where + ": expected a number or an expression string");
}

Complex complex_value(const json& v, const std::string& where) {
    if (v.is_object()) {
        ObjectReader r(v, where);
        const double re = r.optional("re") ? real_value(*r.optional("re"), r.path("re")) : 0.0;
        const double im = r.optional("im") ? real_value(*r.optional("im"), r.path("im")) : 0.0;
        r.finish();
        return {re, im};
    }
    return {real_value(v, where), 0.0};
}

unsigned count_value(const json& v, const std::string& where) {
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(where + ": expected a non-negative integer");
    return v.get<unsigned>();
}

std::string string_value(const json& v, const std::string& where) {
    if (!v.is_string()) throw ConfigError(where + ": expected a string");
    return v.get<std::string>();
}

std::vector<std::string> string_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(string_value(v[i], fmt::format("{}[{}]", where, i)));
    return out;
}

std::vector<std::pair<std::string, unsigned>> count_map(const json& v, const std::string& where) {
    if (!v.is_object()) throw ConfigError(where + ": expected an object of mode -> photon count");
    std::vector<std::pair<std::string, unsigned>> out;
    for (const auto& [k, n] : v.items()) out.emplace_back(k, count_value(n, where + "." + k));
    return out;
}

std::array<bool, 3> parse_triple_name(const std::string& name, const std::string& where) {
    std::array<bool, 3> d{};
    bool ok = name.size() == 6;
    for (std::size_t j = 0; ok && j < 3; ++j) {
        const char kind = name[2 * j];
        ok = (kind == 'C' || kind == 'D') && name[2 * j + 1] == static_cast<char>('1' + j);
        d[j] = kind == 'D';
    }
    if (!ok) throw ConfigError(where + ": expected a pattern such as \"D1D2D3\" or \"C1D2C3\", got \"" + name + "\"");
    return d;
}

TwcScenario parse_twc(ObjectReader& r) {
    TwcScenario s;
    const json& th = r.required("thetas");
    if (!th.is_array() || th.size() != 3) throw ConfigError(r.path("thetas") + ": expected three phases");
    for (std::size_t j = 0; j < 3; ++j) s.thetas[j] = real_value(th[j], fmt::format("{}[{}]", r.path("thetas"), j));
    if (const auto* q = r.optional("q")) s.q = complex_value(*q, r.path("q"));
    if (!(std::abs(s.q) < 1.0)) throw ConfigError(r.path("q") + ": |q| must be < 1");
    if (const auto* n = r.optional("n_max")) s.n_max = count_value(*n, r.path("n_max"));
    if (s.n_max < 1) throw ConfigError(r.path("n_max") + ": must be >= 1");
    if (const auto* p = r.optional("pattern")) s.report_pattern = parse_triple_name(string_value(*p, r.path("pattern")), r.path("pattern"));
    return s;
}

AfsharScenario parse_afshar(ObjectReader& r) {
    AfsharScenario s;
    auto& c = s.config;
    if (const auto* v = r.optional("kappa_y")) c.kappa_y = real_value(*v, r.path("kappa_y"));
    if (const auto* v = r.optional("kappa_z")) c.kappa_z = real_value(*v, r.path("kappa_z"));
    if (const auto* v = r.optional("half_span")) c.half_span = real_value(*v, r.path("half_span"));
    if (const auto* v = r.optional("samples")) c.samples = count_value(*v, r.path("samples"));
    if (const auto* v = r.optional("z")) c.z = real_value(*v, r.path("z"));
    if (const auto* v = r.optional("gamma_peak")) c.gamma_peak = real_value(*v, r.path("gamma_peak"));
    if (const auto* v = r.optional("gamma_profile")) {
        const auto name = string_value(*v, r.path("gamma_profile"));
        if (name == "tophat") c.gamma_profile = afshar::GammaProfile::TopHat;
        else if (name == "gaussian") c.gamma_profile = afshar::GammaProfile::Gaussian;
        else throw ConfigError(r.path("gamma_profile") + ": expected \"tophat\" or \"gaussian\"");
    }
    try {
        c.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("afshar: ") + e.what());
    }
    return s;
}

cqed::RabiSystem parse_rabi(const json& v, const std::string& where, bool& symmetric) {
    ObjectReader r(v, where);
    cqed::RabiSystem sys;
    if (const auto* x = r.optional("basis")) {
        const auto name = string_value(*x, r.path("basis"));
        if (name != "product" && name != "symmetric") throw ConfigError(r.path("basis") + ": expected \"product\" or \"symmetric\"");
        symmetric = name == "symmetric";
    }
    if (const auto* x = r.optional("omega")) sys.omega = real_value(*x, r.path("omega"));
    sys.omega_q = sys.omega / 2.0;
    if (const auto* x = r.optional("omega_q")) sys.omega_q = real_value(*x, r.path("omega_q"));
    if (const auto* x = r.optional("g")) sys.g = real_value(*x, r.path("g"));
    if (const auto* x = r.optional("n_ph")) sys.n_ph = count_value(*x, r.path("n_ph"));
    if (const auto* x = r.optional("mixing_angle")) sys.mixing_angle = real_value(*x, r.path("mixing_angle"));
    r.finish();
    sys.validate();
    if (std::abs(sys.omega_q - sys.omega / 2.0) > 1e-9 * sys.omega) {
        throw ConfigError(where + ".omega_q: the two-atom process needs omega_q = omega/2 (got " +
                          fmt::format("{:.12g}", sys.omega_q) + ")");
    }
    return sys;
}

cqed::StateGraph parse_graph(const json& v, const std::string& where) {
    ObjectReader r(v, where);
    cqed::StateGraph g;
    const json& nodes = r.required("nodes");
    if (!nodes.is_array() || nodes.empty()) throw ConfigError(r.path("nodes") + ": expected a non-empty array");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        ObjectReader n(nodes[i], fmt::format("{}[{}]", r.path("nodes"), i));
        const auto label = string_value(n.required("label"), n.path("label"));
        const double energy = real_value(n.required("energy"), n.path("energy"));
        n.finish();
        g.add_node(label, energy);
    }
    if (const auto* edges = r.optional("edges")) {
        if (!edges->is_array()) throw ConfigError(r.path("edges") + ": expected an array");
        for (std::size_t i = 0; i < edges->size(); ++i) {
            ObjectReader e((*edges)[i], fmt::format("{}[{}]", r.path("edges"), i));
            const auto from = string_value(e.required("from"), e.path("from"));
            const auto to = string_value(e.required("to"), e.path("to"));
            const Complex c = complex_value(e.required("coupling"), e.path("coupling"));
            e.finish();
            g.add_coupling(from, to, c);
        }
    }
    g.set_endpoints(string_value(r.required("initial"), r.path("initial")),
                    string_value(r.required("final"), r.path("final")));
    r.finish();
    g.validate();
    return g;
}

CqedScenario parse_cqed(ObjectReader& r) {
    CqedScenario s;
    const json* rabi = r.optional("rabi");
    const json* graph = r.optional("graph");
    if ((rabi != nullptr) == (graph != nullptr)) throw ConfigError("cqed: give exactly one of 'rabi' or 'graph'");
    if (rabi) s.rabi = parse_rabi(*rabi, r.path("rabi"), s.symmetric_basis);
    else s.graph = parse_graph(*graph, r.path("graph"));
    return s;
}

SplitterConvention parse_convention(const std::string& name, const std::string& where) {
    if (name == "symmetric_i") return SplitterConvention::SymmetricI;
    if (name == "paper_eq6") return SplitterConvention::PaperEq6;
    throw ConfigError(where + ": expected \"symmetric_i\" or \"paper_eq6\"");
}

Element parse_element(const json& v, const std::string& where) {
    ObjectReader r(v, where);
    const auto type = string_value(r.required("type"), r.path("type"));
    if (type == "beam_splitter") {
        const auto in = string_list(r.required("in"), r.path("in"));
        if (in.size() != 2) throw ConfigError(r.path("in") + ": expected two modes");
        std::vector<std::string> out = in;
        if (const auto* o = r.optional("out")) out = string_list(*o, r.path("out"));
        if (out.size() != 2) throw ConfigError(r.path("out") + ": expected two modes");
        const double refl = real_value(r.required("reflectivity"), r.path("reflectivity"));
        auto conv = SplitterConvention::SymmetricI;
        if (const auto* c = r.optional("convention")) conv = parse_convention(string_value(*c, r.path("convention")), r.path("convention"));
        r.finish();
        return BeamSplitter(in[0], in[1], out[0], out[1], refl, conv);
    }
    if (type == "phase") {
        PhaseShifter ps{string_value(r.required("mode"), r.path("mode")), real_value(r.required("theta"), r.path("theta"))};
        r.finish();
        return ps;
    }
    if (type == "coherent") {
        CoherentSource src{string_value(r.required("mode"), r.path("mode")), complex_value(r.required("q"), r.path("q")), 1};
        if (const auto* n = r.optional("n_max")) src.n_max = count_value(*n, r.path("n_max"));
        r.finish();
        return src;
    }
    throw ConfigError(r.path("type") + ": expected \"beam_splitter\", \"phase\" or \"coherent\", got \"" + type + "\"");
}

CustomScenario parse_custom(ObjectReader& r) {
    CustomScenario s;
    s.modes = string_list(r.required("modes"), r.path("modes"));
    if (const auto* lim = r.optional("limits")) {
        ObjectReader l(*lim, r.path("limits"));
        if (const auto* x = l.optional("max_per_mode")) s.limits.max_per_mode = count_value(*x, l.path("max_per_mode"));
        if (const auto* x = l.optional("max_total")) s.limits.max_total = count_value(*x, l.path("max_total"));
        l.finish();
    }
    const json& input = r.required("input");
    if (!input.is_array() || input.empty()) throw ConfigError(r.path("input") + ": expected a non-empty array of terms");
    for (std::size_t i = 0; i < input.size(); ++i) {
        ObjectReader t(input[i], fmt::format("{}[{}]", r.path("input"), i));
        InputTerm term;
        term.counts = count_map(t.required("occupations"), t.path("occupations"));
        term.amplitude = t.optional("amplitude") ? complex_value(*t.optional("amplitude"), t.path("amplitude")) : Complex{1.0};
        t.finish();
        s.input.push_back(std::move(term));
    }
    if (const auto* el = r.optional("elements")) {
        if (!el->is_array()) throw ConfigError(r.path("elements") + ": expected an array");
        for (std::size_t i = 0; i < el->size(); ++i) s.elements.push_back(parse_element((*el)[i], fmt::format("{}[{}]", r.path("elements"), i)));
    }
    if (const auto* pats = r.optional("patterns")) {
        if (!pats->is_array()) throw ConfigError(r.path("patterns") + ": expected an array");
        for (std::size_t i = 0; i < pats->size(); ++i) {
            ObjectReader p((*pats)[i], fmt::format("{}[{}]", r.path("patterns"), i));
            DetectionPattern pat;
            pat.requirements = count_map(p.required("counts"), p.path("counts"));
            pat.name = p.optional("name") ? string_value(*p.optional("name"), p.path("name")) : fmt::format("pattern{}", i + 1);
            p.finish();
            s.patterns.push_back(std::move(pat));
        }
    }
    return s;
}

// Recursive-descent reader for sign? factor ((*|/) factor)*.
class ExpressionParser {
public:
    explicit ExpressionParser(const std::string& text) : s_(text) {}

    double parse() {
        skip();
        double sign = 1.0;
        while (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
            if (s_[pos_] == '-') sign = -sign;
            ++pos_;
            skip();
        }
        double v = factor();
        for (skip(); pos_ < s_.size(); skip()) {
            const char op = s_[pos_];
            if (op != '*' && op != '/') fail("unexpected '" + std::string(1, op) + "'");
            ++pos_;
            const double rhs = factor();
            if (op == '*') v *= rhs;
            else if (rhs == 0.0) fail("division by zero");
            else v /= rhs;
        }
        return sign * v;
    }

private:
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    [[noreturn]] void fail(const std::string& why) const {
        throw ConfigError("cannot read \"" + s_ + "\" as a real: " + why);
    }

    double factor() {
        skip();
        if (s_.compare(pos_, 2, "pi") == 0) {
            pos_ += 2;
            return std::numbers::pi;
        }
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("expected a number or 'pi'");
        pos_ += static_cast<std::size_t>(end - begin);
        return v;
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

/// JSON pointer for each sweepable parameter.
json::json_pointer sweep_pointer(const std::string& kind, const std::string& key) {
    if (kind == "twc") {
        if (key == "theta1") return json::json_pointer("/thetas/0");
        if (key == "theta2") return json::json_pointer("/thetas/1");
        if (key == "theta3") return json::json_pointer("/thetas/2");
        if (key == "q") return json::json_pointer("/q");
    } else if (kind == "afshar") {
        if (key == "gamma_peak" || key == "kappa_y" || key == "kappa_z" || key == "z") return json::json_pointer("/" + key);
    } else if (kind == "cqed") {
        if (key == "g" || key == "mixing_angle") return json::json_pointer("/rabi/" + key);
    }
    std::string known;
    for (const auto& k : sweep_keys(kind)) known += (known.empty() ? "" : ", ") + k;
    throw ConfigError("cannot sweep '" + key + "' for kind '" + kind + "'" +
                      (known.empty() ? std::string(" (this kind has no sweepable parameters)") : " (sweepable: " + known + ")"));
}

}  // namespace

double parse_real_expression(const std::string& text) {
    if (text.empty()) throw ConfigError("empty expression");
    const double v = ExpressionParser(text).parse();
    if (!std::isfinite(v)) throw ConfigError("expression \"" + text + "\" is not finite");
    return v;
}

Scenario parse_scenario(const json& doc) {
    ObjectReader r(doc, "scenario");
    const json& version = r.required("version");
    if (!version.is_number_integer() || version.get<int>() != kScenarioVersion) {
        throw ConfigError(fmt::format("scenario.version: unsupported version {} (expected {})", version.dump(), kScenarioVersion));
    }
    const auto kind = string_value(r.required("kind"), r.path("kind"));
    r.optional("description");
    Scenario out;
    if (kind == "twc") out = parse_twc(r);
    else if (kind == "afshar") out = parse_afshar(r);
    else if (kind == "cqed") out = parse_cqed(r);
    else if (kind == "custom-circuit") out = parse_custom(r);
    else throw ConfigError("scenario.kind: expected twc, afshar, cqed or custom-circuit, got \"" + kind + "\"");
    r.finish();
    return out;
}

json load_scenario_document(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open scenario file '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("scenario file '" + path.string() + "' is not valid JSON: " + e.what());
    }
}

std::string kind_for_command(const std::string& command) {
    return command == "custom" ? "custom-circuit" : command;
}

std::vector<std::string> sweep_keys(const std::string& kind) {
    if (kind == "twc") return {"theta1", "theta2", "theta3", "q"};
    if (kind == "afshar") return {"gamma_peak", "kappa_y", "kappa_z", "z"};
    if (kind == "cqed") return {"g", "mixing_angle"};
    return {};
}

json with_parameter(const json& doc, const std::string& key, double value) {
    const std::string kind = doc.value("kind", "");
    const auto ptr = sweep_pointer(kind, key);
    if (kind == "cqed" && !doc.contains("rabi")) throw ConfigError("sweeping '" + key + "' needs a 'rabi' block");
    json out = doc;
    out[ptr] = value;
    return out;
}

std::vector<double> SweepSpec::points() const {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return out;
}

SweepSpec parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    const auto c1 = text.find(':', eq == std::string::npos ? 0 : eq);
    const auto c2 = c1 == std::string::npos ? c1 : text.find(':', c1 + 1);
    if (eq == std::string::npos || eq == 0 || c1 == std::string::npos || c2 == std::string::npos) {
        throw ConfigError("sweep must look like key=start:stop:count, got \"" + text + "\"");
    }
    SweepSpec s;
    s.key = text.substr(0, eq);
    s.start = parse_real_expression(text.substr(eq + 1, c1 - eq - 1));
    s.stop = parse_real_expression(text.substr(c1 + 1, c2 - c1 - 1));
    const std::string count = text.substr(c2 + 1);
    std::size_t used = 0;
    long long n = 0;
    try {
        n = std::stoll(count, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != count.size() || n < 1 || n > 100000) throw ConfigError("sweep count must be an integer in [1, 100000], got \"" + count + "\"");
    s.count = static_cast<std::size_t>(n);
    return s;
}

}  // namespace qoptics::cli
