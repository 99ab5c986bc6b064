#include "qoptics/detection.hpp"

#include <algorithm>
#include <cmath>

#include "qoptics/errors.hpp"

namespace qoptics {

DetectionPattern triple_pattern(const std::array<bool, 3>& d_clicks) {
    DetectionPattern p;
    for (std::size_t j = 0; j < 3; ++j) {
        p.name += d_clicks[j] ? 'D' : 'C';
        p.name += std::to_string(j + 1);
        p.requirements.emplace_back(TwcModes::detector_c[j], d_clicks[j] ? 0u : 1u);
        p.requirements.emplace_back(TwcModes::detector_d[j], d_clicks[j] ? 1u : 0u);
    }
    return p;
}

std::vector<DetectionPattern> all_triple_patterns() {
    std::vector<DetectionPattern> out;
    for (unsigned bits = 0; bits < 8; ++bits) {
        out.push_back(triple_pattern({(bits & 4) != 0, (bits & 2) != 0, (bits & 1) != 0}));
    }
    return out;
}

double triple_closed_form(const std::array<double, 3>& thetas, Complex q, const std::array<bool, 3>& d_clicks,
                          unsigned n_max) {
    const int n_d = std::count(d_clicks.begin(), d_clicks.end(), true);
    std::array<double, 3> sign{1.0, 1.0, 1.0};
    if (n_d == 1 || n_d == 2) {
        // The odd detector out enters with a minus sign.
        const bool odd = (n_d == 1);
        for (std::size_t j = 0; j < 3; ++j) {
            if (d_clicks[j] == odd) sign[j] = -1.0;
        }
    }
    Complex s{};
    for (std::size_t j = 0; j < 3; ++j) s += sign[j] * std::polar(1.0, thetas[j]);
    return std::norm(twc_m(q, n_max)) / 8.0 * std::norm(s);
}

namespace {

struct ResolvedPattern {
    std::vector<std::pair<std::size_t, unsigned>> req;

    bool matches(const FockTerm& t) const {
        return std::all_of(req.begin(), req.end(), [&](const auto& r) { return t[r.first] == r.second; });
    }
};

ResolvedPattern resolve(const ModeRegistry& reg, const DetectionPattern& pattern) {
    ResolvedPattern r;
    for (const auto& [label, n] : pattern.requirements) r.req.emplace_back(reg.index(label), n);
    return r;
}

}  // namespace

double joint_probability(const StateVector& state, const DetectionPattern& pattern) {
    const auto r = resolve(state.registry(), pattern);
    double p = 0.0;
    for (const auto& [t, a] : state.terms()) {
        if (r.matches(t)) p += std::norm(a);
    }
    return p;
}

Complex post_selected_amplitude(const StateVector& state, const DetectionPattern& pattern) {
    const auto r = resolve(state.registry(), pattern);
    const FockTerm* hit = nullptr;
    Complex amp{};
    for (const auto& [t, a] : state.terms()) {
        if (!r.matches(t)) continue;
        if (hit) {
            throw RegistryError("pattern '" + pattern.name + "' matches several terms (" +
                                describe(*hit, state.registry()) + " and " + describe(t, state.registry()) +
                                "); constrain more modes");
        }
        hit = &t;
        amp = a;
    }
    return amp;
}

// ---------------------------------------------------------------------------

void TaggedState::add_group(std::string tag, StateVector slice) {
    if (!(slice.registry() == *registry_)) throw RegistryError("tagged slice on a foreign registry");
    for (const auto& [other_tag, other] : groups_) {
        if (other_tag == tag) throw RegistryError("duplicate tag '" + tag + "'");
        for (const auto& [t, a] : slice.terms()) {
            if (other.terms().count(t)) throw RegistryError("tag '" + tag + "' overlaps tag '" + other_tag + "'");
        }
    }
    groups_.emplace_back(std::move(tag), std::move(slice));
}

const StateVector& TaggedState::group(const std::string& tag) const {
    for (const auto& [t, s] : groups_) {
        if (t == tag) return s;
    }
    throw RegistryError("unknown tag '" + tag + "'");
}

TaggedState tag_3waves(const StateVector& pre_end_state) {
    const auto& reg = pre_end_state.registry();
    const auto& p = TwcModes::path;
    const auto& e = TwcModes::coherent;
    const std::array<std::pair<const char*, FockTerm>, 3> waves{{
        {"via-a", make_term(reg, {{p[0], 1}, {e[1], 1}, {e[2], 1}})},
        {"via-b", make_term(reg, {{e[0], 1}, {p[1], 1}, {e[2], 1}})},
        {"via-c", make_term(reg, {{e[0], 1}, {e[1], 1}, {p[2], 1}})},
    }};
    TaggedState tagged(pre_end_state.registry_ptr());
    for (const auto& [tag, term] : waves) {
        const Complex a = pre_end_state.amplitude(term);
        if (a == Complex{}) {
            throw RegistryError(std::string("3-wave term ") + describe(term, reg) + " (" + tag +
                                ") is absent from the state");
        }
        tagged.add_group(tag, basis_state(pre_end_state.registry_ptr(), term, a));
    }
    return tagged;
}

Complex contribution(const TaggedState& tagged, const std::string& tag, const Circuit& stage,
                     const DetectionPattern& pattern) {
    return post_selected_amplitude(apply_circuit(tagged.group(tag), stage), pattern);
}

ContradictionReport contradiction_report(const std::array<double, 3>& thetas, Complex q,
                                         const std::array<bool, 3>& d_clicks, unsigned n_max) {
    const TwcSetup setup = build_twc_circuit(thetas, q, n_max);
    const DetectionPattern pattern = triple_pattern(d_clicks);
    const TaggedState tagged = tag_3waves(setup.pre_end_state);

    ContradictionReport rep;
    rep.thetas = thetas;
    rep.q = q;
    rep.n_max = n_max;
    rep.pattern = pattern.name;
    rep.total = post_selected_amplitude(apply_circuit(setup.pre_end_state, setup.end_splitters), pattern);

    Complex sum{};
    for (const auto& [tag, slice] : tagged.groups()) {
        TagContribution c;
        c.tag = tag;
        c.pre_amplitude = slice.terms().begin()->second;
        c.amplitude = contribution(tagged, tag, setup.end_splitters, pattern);
        sum += c.amplitude;
        rep.contributions.push_back(c);
    }
    rep.completeness_residual = std::abs(sum - rep.total);

    const double entire_tol = kContributionTolerance * std::abs(rep.total);
    for (auto& c : rep.contributions) c.entire = std::abs(c.amplitude - rep.total) < entire_tol;
    for (std::size_t i = 0; i < rep.contributions.size(); ++i) {
        for (std::size_t j = i + 1; j < rep.contributions.size(); ++j) {
            const auto& a = rep.contributions[i];
            const auto& b = rep.contributions[j];
            const double mag = std::max(std::abs(a.amplitude), std::abs(b.amplitude));
            if (mag > 0.0 && std::abs(a.amplitude + b.amplitude) < kContributionTolerance * mag) {
                rep.cancelling_pairs.emplace_back(a.tag, b.tag);
            }
        }
    }
    return rep;
}

}  // namespace qoptics
