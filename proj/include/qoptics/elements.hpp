#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qoptics/fock.hpp"

namespace qoptics {

/// Occupation caps enforced while evolving a state. Exceeding either is a
/// TruncationOverflow, never a silent drop.
struct FockLimits {
    unsigned max_per_mode = 2;
    unsigned max_total = 4;
};

enum class SplitterConvention {
    /// Transmission sqrt(1-R), reflection i*sqrt(R) on both inputs.
    SymmetricI,
    /// The 50/50 map u -> (c + d)/sqrt2, e -> (c + i d)/sqrt2. Its two output
    /// images overlap, so it is not unitary and is refused by BeamSplitter.
    PaperEq6,
};

/// Single-photon transfer matrix, indexed [output][input]. Output 0 is the
/// transmitted port of input 0. No unitarity check.
Eigen::Matrix2cd splitter_transfer_matrix(SplitterConvention convention, double reflectivity);

/// Two-port mixer. Inputs and outputs may be the same pair of modes (in-place
/// splitter) or four distinct modes; output modes that are not inputs must be
/// empty when the splitter acts.
class BeamSplitter {
public:
    BeamSplitter(std::string in1, std::string in2, double reflectivity,
                 SplitterConvention convention = SplitterConvention::SymmetricI);
    BeamSplitter(std::string in1, std::string in2, std::string out1, std::string out2,
                 double reflectivity, SplitterConvention convention = SplitterConvention::SymmetricI);

    const std::string& in1() const noexcept { return in_[0]; }
    const std::string& in2() const noexcept { return in_[1]; }
    /// Transmitted port of in1 (reflected port of in2).
    const std::string& out1() const noexcept { return out_[0]; }
    const std::string& out2() const noexcept { return out_[1]; }
    double reflectivity() const noexcept { return reflectivity_; }
    SplitterConvention convention() const noexcept { return convention_; }
    const Eigen::Matrix2cd& transfer() const noexcept { return transfer_; }

private:
    std::array<std::string, 2> in_;
    std::array<std::string, 2> out_;
    double reflectivity_;
    SplitterConvention convention_;
    Eigen::Matrix2cd transfer_;
};

struct PhaseShifter {
    std::string mode;
    double theta = 0.0;  // radians

    Complex factor() const { return std::polar(1.0, theta); }
};

/// Truncated coherent beam N * sum_{n<=n_max} q^n / sqrt(n!) |n>.
struct CoherentSource {
    std::string mode;
    Complex q{};
    unsigned n_max = 1;
};

using Element = std::variant<BeamSplitter, PhaseShifter, CoherentSource>;

std::vector<std::string> referenced_modes(const Element& element);

/// Ordered element list over a fixed registry. Every referenced mode is
/// checked at construction.
class Circuit {
public:
    explicit Circuit(RegistryPtr registry, std::vector<Element> elements = {}, FockLimits limits = {});

    const ModeRegistry& registry() const noexcept { return *registry_; }
    const RegistryPtr& registry_ptr() const noexcept { return registry_; }
    const std::vector<Element>& elements() const noexcept { return elements_; }
    const FockLimits& limits() const noexcept { return limits_; }
    bool passive() const;

    /// This circuit followed by `next` (same registry).
    Circuit then(const Circuit& next) const;

private:
    RegistryPtr registry_;
    std::vector<Element> elements_;
    FockLimits limits_;
};

StateVector apply_beam_splitter(const StateVector& state, const BeamSplitter& bs, const FockLimits& limits = {});
StateVector apply_phase(const StateVector& state, const PhaseShifter& ps);
/// Normalized single-mode state on a registry holding just `src.mode`.
/// Throws ConfigError when |q| >= 1.
StateVector emit_coherent(const CoherentSource& src);
/// Fills a mode that is empty in every term with the coherent superposition.
StateVector apply_source(const StateVector& state, const CoherentSource& src, const FockLimits& limits = {});
StateVector apply_element(const StateVector& state, const Element& element, const FockLimits& limits = {});
StateVector apply_circuit(const StateVector& state, const Circuit& circuit);

// --- The three-path interferometer with weak coherent beams at its end splitters.

struct TwcModes {
    static constexpr const char* source = "s";
    static constexpr const char* transmitted = "t";
    static constexpr std::array<const char*, 3> path{"a", "b", "c"};
    static constexpr std::array<const char*, 3> coherent{"e1", "e2", "e3"};
    static constexpr std::array<const char*, 3> detector_c{"c1", "c2", "c3"};
    static constexpr std::array<const char*, 3> detector_d{"d1", "d2", "d3"};

    static std::vector<std::string> all();
};

struct TwcSetup {
    /// Source photon in `s`, every other mode empty.
    StateVector input;
    /// Splitter tree, compensating phases, path phases and coherent sources.
    Circuit preparation;
    /// The three end splitters (u_j, e_j) -> (d_j, c_j).
    Circuit end_splitters;
    /// preparation.then(end_splitters)
    Circuit full;
    /// apply_circuit(input, preparation)
    StateVector pre_end_state;
    Complex q;
    std::array<double, 3> thetas;
};

/// Normalization of the coherent state truncated at n_max photons;
/// 1/sqrt(1+|q|^2) for n_max = 1.
double coherent_normalization(Complex q, unsigned n_max = 1);
/// Amplitude scale of the two-coherent-photon sector, N^3 q^2 / sqrt(3).
Complex twc_m(Complex q, unsigned n_max = 1);

/// Caps large enough for the interferometer: n_max + 1 per mode, 1 + 3 n_max in total.
FockLimits twc_limits(unsigned n_max);

TwcSetup build_twc_circuit(const std::array<double, 3>& thetas, Complex q, unsigned n_max = 1,
                           std::optional<FockLimits> limits = std::nullopt);

}  // namespace qoptics
