#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "qoptics/elements.hpp"
#include "qoptics/fock.hpp"

namespace qoptics {

/// Exact photon counts required on a subset of modes. Modes not listed are
/// summed over.
struct DetectionPattern {
    std::string name;
    std::vector<std::pair<std::string, unsigned>> requirements;
};

/// One click behind each end splitter: `d_clicks[j]` selects D_j (one photon in
/// d_j, none in c_j) over C_j.
DetectionPattern triple_pattern(const std::array<bool, 3>& d_clicks);
/// All eight one-click-per-splitter patterns, C1C2C3 first and D1D2D3 last.
std::vector<DetectionPattern> all_triple_patterns();

/// |M|^2/8 |e^{i t_j} + e^{i t_k} -/+ e^{i t_l}|^2 for the given triple pattern.
double triple_closed_form(const std::array<double, 3>& thetas, Complex q, const std::array<bool, 3>& d_clicks,
                          unsigned n_max = 1);

double joint_probability(const StateVector& state, const DetectionPattern& pattern);

/// Amplitude of the single term matching `pattern`. Zero when nothing matches;
/// RegistryError when several terms match (pattern under-specified).
Complex post_selected_amplitude(const StateVector& state, const DetectionPattern& pattern);

/// Disjoint slices of one state, keyed by tag in insertion order.
class TaggedState {
public:
    explicit TaggedState(RegistryPtr registry) : registry_(std::move(registry)) {}

    void add_group(std::string tag, StateVector slice);
    const StateVector& group(const std::string& tag) const;
    const std::vector<std::pair<std::string, StateVector>>& groups() const noexcept { return groups_; }
    const ModeRegistry& registry() const noexcept { return *registry_; }

private:
    RegistryPtr registry_;
    std::vector<std::pair<std::string, StateVector>> groups_;
};

/// Splits the pre-end-splitter interferometer state into the three product
/// terms that can yield one click per splitter: a e2 e3, e1 b e3, e1 e2 c.
TaggedState tag_3waves(const StateVector& pre_end_state);

/// Amplitude reached when only the tagged slice is sent through `stage`.
Complex contribution(const TaggedState& tagged, const std::string& tag, const Circuit& stage,
                     const DetectionPattern& pattern);

struct TagContribution {
    std::string tag;
    Complex pre_amplitude;  // amplitude of the tagged term before the end splitters
    Complex amplitude;      // its share of the post-selected amplitude
    bool entire = false;    // equals the total amplitude on its own
};

struct ContradictionReport {
    std::array<double, 3> thetas{};
    Complex q;
    unsigned n_max = 1;
    std::string pattern;
    Complex total;
    std::vector<TagContribution> contributions;
    std::vector<std::pair<std::string, std::string>> cancelling_pairs;
    /// |sum of contributions - total|
    double completeness_residual = 0.0;
};

/// Relative tolerance for "this contribution is the entire amplitude" and for
/// mutual cancellation.
inline constexpr double kContributionTolerance = 1e-10;

ContradictionReport contradiction_report(const std::array<double, 3>& thetas, Complex q = 0.2,
                                         const std::array<bool, 3>& d_clicks = {true, true, true},
                                         unsigned n_max = 1);

}  // namespace qoptics
