#include "qoptics/elements.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qoptics/errors.hpp"

namespace qoptics {

namespace {

double factorial(unsigned n) {
    double f = 1.0;
    for (unsigned i = 2; i <= n; ++i) f *= i;
    return f;
}

double binomial(unsigned n, unsigned k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

Complex ipow(Complex z, unsigned n) {
    Complex r = 1.0;
    for (unsigned i = 0; i < n; ++i) r *= z;
    return r;
}

void check_caps(const FockTerm& term, const FockLimits& limits, const char* what) {
    for (unsigned n : term.occupations) {
        if (n > limits.max_per_mode) {
            throw TruncationOverflow(std::string(what) + ": a mode reaches " + std::to_string(n) +
                                     " photons, above the per-mode cap " +
                                     std::to_string(limits.max_per_mode));
        }
    }
    if (term.total() > limits.max_total) {
        throw TruncationOverflow(std::string(what) + ": a term carries " + std::to_string(term.total()) +
                                 " photons, above the total cap " + std::to_string(limits.max_total));
    }
}

}  // namespace

Eigen::Matrix2cd splitter_transfer_matrix(SplitterConvention convention, double reflectivity) {
    Eigen::Matrix2cd m;
    switch (convention) {
        case SplitterConvention::SymmetricI: {
            const Complex t = std::sqrt(1.0 - reflectivity);
            const Complex r = Complex(0.0, std::sqrt(reflectivity));
            m << t, r, r, t;
            break;
        }
        case SplitterConvention::PaperEq6: {
            // u -> (c + d)/sqrt2 and e -> (c + i d)/sqrt2 with out1 = c, out2 = d.
            const double s = 1.0 / std::numbers::sqrt2;
            m << s, s, s, Complex(0.0, s);
            break;
        }
    }
    return m;
}

BeamSplitter::BeamSplitter(std::string in1, std::string in2, double reflectivity, SplitterConvention convention)
    : BeamSplitter(in1, in2, in1, in2, reflectivity, convention) {}

BeamSplitter::BeamSplitter(std::string in1, std::string in2, std::string out1, std::string out2,
                           double reflectivity, SplitterConvention convention)
    : in_{std::move(in1), std::move(in2)},
      out_{std::move(out1), std::move(out2)},
      reflectivity_(reflectivity),
      convention_(convention) {
    if (in_[0] == in_[1] || out_[0] == out_[1]) throw ConfigError("beam splitter ports must be two distinct modes");
    if (!(reflectivity >= 0.0 && reflectivity <= 1.0)) {
        throw ConfigError("beam splitter reflectivity must lie in [0, 1]");
    }
    if (convention == SplitterConvention::PaperEq6) {
        const auto m = splitter_transfer_matrix(convention, 0.5);
        const Complex overlap = m.col(0).dot(m.col(1));
        std::ostringstream os;
        os << "the PaperEq6 splitter convention is not unitary: its two single-photon output images have "
              "overlap "
           << overlap << " instead of 0; use SymmetricI";
        throw ConfigError(os.str());
    }
    transfer_ = splitter_transfer_matrix(convention, reflectivity);
    const double defect = (transfer_.adjoint() * transfer_ - Eigen::Matrix2cd::Identity()).norm();
    if (defect > 1e-12) throw ConfigError("beam splitter transfer matrix is not unitary");
}

std::vector<std::string> referenced_modes(const Element& element) {
    return std::visit(
        [](const auto& e) -> std::vector<std::string> {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, BeamSplitter>) {
                return {e.in1(), e.in2(), e.out1(), e.out2()};
            } else {
                return {e.mode};
            }
        },
        element);
}

Circuit::Circuit(RegistryPtr registry, std::vector<Element> elements, FockLimits limits)
    : registry_(std::move(registry)), elements_(std::move(elements)), limits_(limits) {
    if (!registry_) throw RegistryError("circuit requires a mode registry");
    for (const auto& e : elements_) {
        for (const auto& label : referenced_modes(e)) registry_->index(label);
        if (const auto* src = std::get_if<CoherentSource>(&e); src && std::abs(src->q) >= 1.0) {
            throw ConfigError("coherent source on '" + src->mode + "' needs |q| < 1");
        }
    }
}

bool Circuit::passive() const {
    for (const auto& e : elements_) {
        if (std::holds_alternative<CoherentSource>(e)) return false;
    }
    return true;
}

Circuit Circuit::then(const Circuit& next) const {
    if (!(registry() == next.registry())) throw RegistryError("cannot chain circuits on different registries");
    std::vector<Element> all = elements_;
    all.insert(all.end(), next.elements_.begin(), next.elements_.end());
    FockLimits limits{std::max(limits_.max_per_mode, next.limits_.max_per_mode),
                      std::max(limits_.max_total, next.limits_.max_total)};
    return Circuit(registry_, std::move(all), limits);
}

// ---------------------------------------------------------------------------

StateVector apply_beam_splitter(const StateVector& state, const BeamSplitter& bs, const FockLimits& limits) {
    const auto& reg = state.registry();
    const std::size_t i1 = reg.index(bs.in1()), i2 = reg.index(bs.in2());
    const std::size_t o1 = reg.index(bs.out1()), o2 = reg.index(bs.out2());
    const auto& u = bs.transfer();

    StateVector::Builder out(state.registry_ptr(), state.prune_threshold());
    for (const auto& [term, amp] : state.terms()) {
        const unsigned n1 = term[i1], n2 = term[i2], n = n1 + n2;
        FockTerm base = term;
        base[i1] = 0;
        base[i2] = 0;
        if (base[o1] != 0 || base[o2] != 0) {
            throw RegistryError("beam splitter output port '" + (base[o1] ? bs.out1() : bs.out2()) +
                                "' is already occupied");
        }
        const double norm_in = std::sqrt(factorial(n1) * factorial(n2));
        // a1^dag -> u00 o1^dag + u10 o2^dag,  a2^dag -> u01 o1^dag + u11 o2^dag
        for (unsigned k = 0; k <= n1; ++k) {
            const Complex ck = binomial(n1, k) * ipow(u(0, 0), k) * ipow(u(1, 0), n1 - k);
            for (unsigned l = 0; l <= n2; ++l) {
                const Complex cl = binomial(n2, l) * ipow(u(0, 1), l) * ipow(u(1, 1), n2 - l);
                const unsigned m1 = k + l, m2 = n - m1;
                const Complex c = amp * ck * cl * std::sqrt(factorial(m1) * factorial(m2)) / norm_in;
                if (std::abs(c) < state.prune_threshold()) continue;
                FockTerm t = base;
                t[o1] = m1;
                t[o2] = m2;
                check_caps(t, limits, "beam splitter");
                out.add(std::move(t), c);
            }
        }
    }
    return std::move(out).build();
}

StateVector apply_phase(const StateVector& state, const PhaseShifter& ps) {
    const std::size_t i = state.registry().index(ps.mode);
    StateVector::Builder out(state.registry_ptr(), state.prune_threshold());
    for (const auto& [term, amp] : state.terms()) {
        out.add(term, amp * std::polar(1.0, ps.theta * term[i]));
    }
    return std::move(out).build();
}

namespace {

std::vector<Complex> coherent_amplitudes(const CoherentSource& src) {
    if (std::abs(src.q) >= 1.0) throw ConfigError("coherent source on '" + src.mode + "' needs |q| < 1");
    std::vector<Complex> amps(src.n_max + 1);
    double norm2 = 0.0;
    for (unsigned n = 0; n <= src.n_max; ++n) {
        amps[n] = ipow(src.q, n) / std::sqrt(factorial(n));
        norm2 += std::norm(amps[n]);
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto& a : amps) a *= scale;
    return amps;
}

}  // namespace

StateVector emit_coherent(const CoherentSource& src) {
    const auto amps = coherent_amplitudes(src);
    StateVector::Builder b(make_registry({src.mode}));
    for (unsigned n = 0; n < amps.size(); ++n) b.add(FockTerm({n}), amps[n]);
    return std::move(b).build();
}

StateVector apply_source(const StateVector& state, const CoherentSource& src, const FockLimits& limits) {
    const auto amps = coherent_amplitudes(src);
    const std::size_t i = state.registry().index(src.mode);
    StateVector::Builder out(state.registry_ptr(), state.prune_threshold());
    for (const auto& [term, amp] : state.terms()) {
        if (term[i] != 0) throw RegistryError("coherent source mode '" + src.mode + "' is already occupied");
        for (unsigned n = 0; n < amps.size(); ++n) {
            const Complex c = amp * amps[n];
            if (std::abs(c) < state.prune_threshold()) continue;
            FockTerm t = term;
            t[i] = n;
            check_caps(t, limits, "coherent source");
            out.add(std::move(t), c);
        }
    }
    return std::move(out).build();
}

StateVector apply_element(const StateVector& state, const Element& element, const FockLimits& limits) {
    return std::visit(
        [&](const auto& e) -> StateVector {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, BeamSplitter>) {
                return apply_beam_splitter(state, e, limits);
            } else if constexpr (std::is_same_v<T, PhaseShifter>) {
                return apply_phase(state, e);
            } else {
                return apply_source(state, e, limits);
            }
        },
        element);
}

StateVector apply_circuit(const StateVector& state, const Circuit& circuit) {
    if (!(state.registry() == circuit.registry())) {
        throw RegistryError("state and circuit use different mode registries");
    }
    StateVector current = state;
    for (const auto& e : circuit.elements()) current = apply_element(current, e, circuit.limits());
    return current;
}

// ---------------------------------------------------------------------------

std::vector<std::string> TwcModes::all() {
    std::vector<std::string> labels{source, transmitted};
    for (auto* l : path) labels.emplace_back(l);
    for (auto* l : coherent) labels.emplace_back(l);
    for (std::size_t j = 0; j < 3; ++j) {
        labels.emplace_back(detector_c[j]);
        labels.emplace_back(detector_d[j]);
    }
    return labels;
}

double coherent_normalization(Complex q, unsigned n_max) {
    double norm2 = 0.0;
    for (unsigned n = 0; n <= n_max; ++n) norm2 += std::norm(ipow(q, n)) / factorial(n);
    return 1.0 / std::sqrt(norm2);
}

Complex twc_m(Complex q, unsigned n_max) {
    const double n = coherent_normalization(q, n_max);
    return n * n * n * q * q / std::sqrt(3.0);
}

FockLimits twc_limits(unsigned n_max) { return {n_max + 1, 1 + 3 * n_max}; }

TwcSetup build_twc_circuit(const std::array<double, 3>& thetas, Complex q, unsigned n_max,
                           std::optional<FockLimits> limits_override) {
    const FockLimits limits = limits_override.value_or(twc_limits(n_max));
    using std::numbers::pi;
    auto registry = make_registry(TwcModes::all());
    const auto& p = TwcModes::path;

    std::vector<Element> prep;
    for (auto* e : TwcModes::coherent) prep.emplace_back(CoherentSource{e, q, n_max});
    // BS sends 1/3 of the intensity to path a; BS' halves the rest into b and c.
    prep.emplace_back(BeamSplitter(TwcModes::source, p[0], TwcModes::transmitted, p[0], 1.0 / 3.0));
    prep.emplace_back(BeamSplitter(TwcModes::transmitted, p[2], p[1], p[2], 0.5));
    // After the tree the paths carry (i, 1, i)/sqrt3; rotate all three to -1/sqrt3.
    prep.emplace_back(PhaseShifter{p[0], pi / 2});
    prep.emplace_back(PhaseShifter{p[1], pi});
    prep.emplace_back(PhaseShifter{p[2], pi / 2});
    for (std::size_t j = 0; j < 3; ++j) prep.emplace_back(PhaseShifter{p[j], thetas[j]});

    std::vector<Element> ebs;
    for (std::size_t j = 0; j < 3; ++j) {
        ebs.emplace_back(BeamSplitter(p[j], TwcModes::coherent[j], TwcModes::detector_d[j],
                                      TwcModes::detector_c[j], 0.5));
    }

    Circuit preparation(registry, std::move(prep), limits);
    Circuit end_splitters(registry, std::move(ebs), limits);
    Circuit full = preparation.then(end_splitters);
    StateVector input = basis_state(registry, make_term(*registry, {{TwcModes::source, 1}}));
    StateVector pre = apply_circuit(input, preparation);
    return TwcSetup{std::move(input), std::move(preparation), std::move(end_splitters), std::move(full),
                    std::move(pre), q, thetas};
}

}  // namespace qoptics
