#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include <fmt/format.h>

#include "qoptics/errors.hpp"

namespace qoptics::cli {

using nlohmann::ordered_json;

namespace {

ordered_json complex_json(Complex z) {
    return ordered_json{{"re", json_number(z.real())}, {"im", json_number(z.imag())}};
}

void check_probability(double p, const std::string& what) {
    if (!(p >= -kProbabilityTolerance && p <= 1.0 + kProbabilityTolerance)) {
        throw Error(fmt::format("{} = {:.12g} lies outside [0, 1]", what, p));
    }
}

ordered_json engine_metadata(const FockLimits& limits) {
    return ordered_json{{"splitter_convention", "symmetric_i"},
                        {"prune_threshold", kPruneThreshold},
                        {"max_per_mode", limits.max_per_mode},
                        {"max_total", limits.max_total}};
}

std::string thetas_text(const std::array<double, 3>& t) {
    return fmt::format("({}, {}, {})", format_number(t[0]), format_number(t[1]), format_number(t[2]));
}

}  // namespace

RunReport cmd_twc(const TwcScenario& s) {
    RunReport rep;
    rep.command = "twc";
    rep.primary_table = "patterns";

    const TwcSetup setup = build_twc_circuit(s.thetas, s.q, s.n_max);
    const StateVector out = apply_circuit(setup.input, setup.full);
    const ContradictionReport cr = contradiction_report(s.thetas, s.q, s.report_pattern, s.n_max);
    const Complex m = twc_m(s.q, s.n_max);

    Table patterns{"patterns", {"pattern", "probability", "closed_form", "residual"}};
    Table amplitudes{"amplitudes", {"pattern", "amplitude_re", "amplitude_im"}};
    double max_residual = 0.0;
    for (const auto& pat : all_triple_patterns()) {
        std::array<bool, 3> d{};
        for (std::size_t j = 0; j < 3; ++j) d[j] = pat.name[2 * j] == 'D';
        const double p = joint_probability(out, pat);
        check_probability(p, "P(" + pat.name + ")");
        const double closed = triple_closed_form(s.thetas, s.q, d, s.n_max);
        max_residual = std::max(max_residual, std::abs(p - closed));
        patterns.add_row({pat.name, p, closed, p - closed});
        const Complex a = post_selected_amplitude(out, pat);
        amplitudes.add_row({pat.name, a.real(), a.imag()});
        rep.summary.emplace_back("P_" + pat.name, p);
    }
    rep.summary.emplace_back("max_residual", max_residual);

    Table contributions{"contributions", {"tag", "pre_amplitude_re", "pre_amplitude_im", "amplitude_re", "amplitude_im", "equals_total"}};
    for (const auto& c : cr.contributions) {
        contributions.add_row({c.tag, c.pre_amplitude.real(), c.pre_amplitude.imag(), c.amplitude.real(), c.amplitude.imag(), c.entire});
    }
    Table pairs{"cancelling_pairs", {"first", "second"}};
    for (const auto& [a, b] : cr.cancelling_pairs) pairs.add_row({a, b});

    std::vector<std::string> entire;
    for (const auto& c : cr.contributions) {
        if (c.entire) entire.push_back(c.tag);
    }

    rep.inputs = {{"thetas", {s.thetas[0], s.thetas[1], s.thetas[2]}}, {"q", complex_json(s.q)}, {"n_max", s.n_max}, {"pattern", cr.pattern}};
    rep.results = {{"thetas", thetas_text(s.thetas)},
                   {"M", complex_json(m)},
                   {"normalization", json_number(coherent_normalization(s.q, s.n_max))},
                   {"report_pattern", cr.pattern},
                   {"total_amplitude", complex_json(cr.total)},
                   {"entire_amplitude_tags", entire},
                   {"completeness_residual", json_number(cr.completeness_residual)},
                   {"max_pattern_residual", json_number(max_residual)}};
    rep.metadata = engine_metadata(setup.full.limits());
    rep.metadata["contribution_tolerance"] = kContributionTolerance;
    rep.metadata["evolved_terms"] = out.size();
    rep.metadata["evolved_norm"] = json_number(out.norm());

    rep.tables = {std::move(patterns), std::move(contributions), std::move(pairs), std::move(amplitudes)};
    return rep;
}

RunReport cmd_afshar(const AfsharScenario& s) {
    using namespace afshar;
    RunReport rep;
    rep.command = "afshar";
    rep.primary_table = "profile";
    const AfsharConfig& cfg = s.config;
    AfsharConfig open = cfg;
    open.gamma_peak = 0.0;

    Table images{"images", {"polarizer", "image1", "image2", "image1_no_wire", "image2_no_wire", "reduction1", "reduction2"}};
    auto reduction = [](double with, double without) { return without > 0.0 ? 1.0 - with / without : 0.0; };
    std::map<Polarizer, std::pair<double, double>> wired;
    for (Polarizer p : {Polarizer::None, Polarizer::H, Polarizer::V, Polarizer::D, Polarizer::A}) {
        const auto [i1, i2] = image_intensities(cfg, p);
        const auto [o1, o2] = image_intensities(open, p);
        wired[p] = {i1, i2};
        images.add_row({std::string(to_string(p)), i1, i2, o1, o2, reduction(i1, o1), reduction(i2, o2)});
        rep.summary.emplace_back(fmt::format("I1_{}", to_string(p)), i1);
        rep.summary.emplace_back(fmt::format("I2_{}", to_string(p)), i2);
    }

    const PolarizedField field = apply_wire(two_slit_field(cfg), cfg);
    const IntensityMap map = intensities(field);
    Table profile{"profile", {"y", "gamma", "J_H", "J_V", "J_D", "J_A"}};
    profile.bulk = true;
    for (std::size_t i = 0; i < map.y.size(); ++i) {
        const auto& v = map.samples[i];
        profile.add_row({map.y[i], gamma_at(cfg, map.y[i]), v.h, v.v, v.d, v.a});
    }

    const auto [a1, a2] = image_intensities(open, Polarizer::A);
    const auto& [wa1, wa2] = wired[Polarizer::A];
    const auto& [wd1, wd2] = wired[Polarizer::D];
    rep.inputs = {{"kappa_y", cfg.kappa_y},
                  {"kappa_z", cfg.kappa_z},
                  {"y_min", json_number(cfg.y_min())},
                  {"y_max", json_number(cfg.y_max())},
                  {"samples", cfg.samples},
                  {"z", cfg.z},
                  {"gamma_peak", cfg.gamma_peak},
                  {"gamma_profile", std::string(to_string(cfg.gamma_profile))}};
    rep.results = {{"wire_diameter", json_number(cfg.wire_diameter())},
                   {"H_image2_dark", wired[Polarizer::H].second == 0.0},
                   {"A_reduction", json_number(reduction(wa1, a1))},
                   {"D_reduction_vs_A", json_number(reduction(wd1, wa1))},
                   {"D_dimmer_than_A", wd1 < wa1 && wd2 < wa2}};
    rep.metadata = {{"integration", "trapezoid"}, {"lens_model", "slit-to-image flux map"}};
    rep.tables = {std::move(images), std::move(profile)};
    return rep;
}

namespace {

Table channel_table(const cqed::StateGraph& graph, const std::vector<cqed::ChannelPath>& channels) {
    Table t{"channels", {"path", "numerator_re", "numerator_im", "denominator", "term_re", "term_im"}};
    for (const auto& c : channels) {
        t.add_row({cqed::path_label(graph, c), c.numerator.real(), c.numerator.imag(), c.denominator, c.term.real(), c.term.imag()});
    }
    return t;
}

}  // namespace

RunReport cmd_cqed(const CqedScenario& s) {
    using namespace cqed;
    RunReport rep;
    rep.command = "cqed";
    rep.primary_table = "channels";

    if (s.graph) {
        const auto channels = enumerate_channels(*s.graph);
        const double oe = omega_eff(*s.graph);
        rep.tables.push_back(channel_table(*s.graph, channels));
        rep.inputs = {{"nodes", s.graph->nodes().size()},
                      {"initial", s.graph->nodes()[s.graph->initial()].label},
                      {"final", s.graph->nodes()[s.graph->final_state()].label}};
        rep.results = {{"channel_count", channels.size()},
                       {"omega_eff", json_number(oe)},
                       {"min_detuning", json_number(channels.empty() ? 0.0 : min_detuning(*s.graph))}};
        rep.summary.emplace_back("omega_eff", oe);
    } else {
        const RabiSystem& sys = *s.rabi;
        const StateGraph graph = s.symmetric_basis ? symmetric_rabi_graph(sys) : build_two_atom_rabi(sys).graph;
        const auto channels = enumerate_channels(graph);
        const SplittingComparison cmp = compare_with_exact(sys);
        RabiSystem doubled = sys;
        doubled.n_ph = 2 * sys.n_ph;
        const SplittingComparison cmp2 = compare_with_exact(doubled);
        const double change = cmp.splitting == 0.0 ? (cmp2.splitting == 0.0 ? 0.0 : 1.0)
                                                   : std::abs(cmp2.splitting - cmp.splitting) / cmp.splitting;
        rep.tables.push_back(channel_table(graph, channels));
        rep.inputs = {{"omega", sys.omega}, {"omega_q", sys.omega_q}, {"g", sys.g}, {"n_ph", sys.n_ph}, {"mixing_angle", sys.mixing_angle},
                      {"basis", s.symmetric_basis ? "symmetric" : "product"}};
        rep.results = {{"channel_count", channels.size()},
                       {"omega_eff", json_number(cmp.omega_eff)},
                       {"g_over_detuning", json_number(cmp.detuning > 0.0 ? sys.g / cmp.detuning : 0.0)},
                       {"tuned_omega_q", json_number(cmp.tuned.omega_q)},
                       {"exact_splitting", json_number(cmp.splitting)},
                       {"half_splitting", json_number(cmp.splitting / 2.0)},
                       {"relative_discrepancy", json_number(cmp.relative_discrepancy)},
                       {"splitting_doubled_n_ph", json_number(cmp2.splitting)},
                       {"truncation_change", json_number(change)}};
        rep.summary = {{"omega_eff", cmp.omega_eff}, {"exact_splitting", cmp.splitting}, {"relative_discrepancy", cmp.relative_discrepancy}};
    }
    rep.metadata = {{"degeneracy_tolerance", kDegeneracyTolerance}};
    return rep;
}

RunReport cmd_custom(const CustomScenario& s) {
    RunReport rep;
    rep.command = "custom";
    rep.primary_table = "terms";

    const RegistryPtr reg = make_registry(s.modes);
    StateVector::Builder b(reg);
    for (const auto& t : s.input) b.add(make_term(*reg, t.counts), t.amplitude);
    const StateVector input = std::move(b).build();
    if (input.norm_squared() > 1.0 + kProbabilityTolerance) {
        throw ConfigError(fmt::format("input state has squared norm {:.12g} > 1", input.norm_squared()));
    }
    const Circuit circuit(reg, s.elements, s.limits);
    const StateVector out = apply_circuit(input, circuit);

    Table terms{"terms", {"term", "amplitude_re", "amplitude_im", "magnitude", "probability"}};
    double total = 0.0;
    for (const auto& [term, amp] : out.terms()) {
        terms.add_row({describe(term, *reg), amp.real(), amp.imag(), std::abs(amp), std::norm(amp)});
        total += std::norm(amp);
    }
    check_probability(total, "total probability");

    Table patterns{"patterns", {"pattern", "probability"}};
    for (const auto& pat : s.patterns) {
        const double p = joint_probability(out, pat);
        check_probability(p, "P(" + pat.name + ")");
        patterns.add_row({pat.name, p});
        rep.summary.emplace_back("P_" + pat.name, p);
    }

    rep.inputs = {{"modes", s.modes}, {"elements", s.elements.size()}, {"input_terms", input.size()}};
    rep.results = {{"terms", out.size()}, {"total_probability", json_number(total)}, {"passive", circuit.passive()}};
    rep.metadata = engine_metadata(s.limits);
    rep.tables = {std::move(terms), std::move(patterns)};
    return rep;
}

RunReport run_scenario(const std::string& command, const nlohmann::json& doc) {
    const std::string expected = kind_for_command(command);
    if (!doc.is_object() || !doc.contains("kind") || doc.at("kind") != expected) {
        const std::string got = doc.is_object() && doc.contains("kind") ? doc.at("kind").dump() : "nothing";
        throw ConfigError("command '" + command + "' needs a scenario of kind \"" + expected + "\", got " + got);
    }
    const Scenario scenario = parse_scenario(doc);
    RunReport rep = std::visit(
        [](const auto& s) -> RunReport {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, TwcScenario>) return cmd_twc(s);
            else if constexpr (std::is_same_v<T, AfsharScenario>) return cmd_afshar(s);
            else if constexpr (std::is_same_v<T, CqedScenario>) return cmd_cqed(s);
            else return cmd_custom(s);
        },
        scenario);
    rep.inputs["scenario"] = ordered_json::parse(doc.dump());
    return rep;
}

RunReport run_sweep(const std::string& command, const nlohmann::json& doc, const SweepSpec& sweep) {
    const std::string kind = kind_for_command(command);
    const auto points = sweep.points();
    std::vector<nlohmann::json> docs;
    for (double x : points) docs.push_back(with_parameter(doc, sweep.key, x));

    std::vector<std::future<RunReport>> jobs;
    for (const auto& d : docs) jobs.push_back(std::async(std::launch::async, [&command, &d] { return run_scenario(command, d); }));
    std::vector<RunReport> runs;
    for (auto& j : jobs) runs.push_back(j.get());

    RunReport rep;
    rep.command = command + " sweep";
    rep.primary_table = "sweep";
    Table t{"sweep", {sweep.key}};
    for (const auto& [name, v] : runs.front().summary) t.columns.push_back(name);
    for (std::size_t i = 0; i < runs.size(); ++i) {
        std::vector<Cell> row{points[i]};
        for (const auto& [name, v] : runs[i].summary) row.push_back(v);
        t.add_row(std::move(row));
    }
    rep.inputs = {{"sweep", {{"key", sweep.key}, {"start", sweep.start}, {"stop", sweep.stop}, {"count", sweep.count}}},
                  {"scenario", ordered_json::parse(doc.dump())}};
    rep.metadata = runs.front().metadata;
    rep.tables.push_back(std::move(t));
    return rep;
}

}  // namespace qoptics::cli
