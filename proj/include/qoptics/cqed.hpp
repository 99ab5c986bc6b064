#pragma once

#include <array>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qoptics/fock.hpp"

namespace qoptics::cqed {

/// Intermediate states closer than this fraction of max|E| to E_i are resonant.
inline constexpr double kDegeneracyTolerance = 1e-9;

struct GraphNode {
    std::string label;
    double energy;
};

/// Energy-labelled states joined by Hermitian couplings. `coupling(k, j)` is
/// the transition amplitude V_kj from j to k.
class StateGraph {
public:
    std::size_t add_node(std::string label, double energy);
    /// Sets V_{to,from} = v and V_{from,to} = conj(v).
    void add_coupling(const std::string& from, const std::string& to, Complex v);
    void add_coupling(std::size_t from, std::size_t to, Complex v);
    void set_endpoints(const std::string& initial, const std::string& final_state);

    const std::vector<GraphNode>& nodes() const noexcept { return nodes_; }
    std::size_t index(const std::string& label) const;
    Complex coupling(std::size_t to, std::size_t from) const;
    /// Nodes reachable from `from` through a nonzero coupling, ascending.
    const std::vector<std::size_t>& neighbours(std::size_t from) const { return adjacency_.at(from); }

    std::size_t initial() const;
    std::size_t final_state() const;
    double energy_scale() const;

    /// Checks Hermiticity and E_i = E_f; throws ConfigError otherwise.
    void validate() const;

private:
    std::vector<GraphNode> nodes_;
    std::map<std::pair<std::size_t, std::size_t>, Complex> couplings_;
    std::vector<std::vector<std::size_t>> adjacency_;
    std::optional<std::size_t> initial_, final_;
};

/// One third-order route i -> m -> n -> f and its summand in Omega_eff.
struct ChannelPath {
    std::array<std::size_t, 4> nodes{};
    Complex numerator;   // V_fn V_nm V_mi
    double denominator;  // (E_i - E_m)(E_i - E_n)
    Complex term;        // -numerator / denominator
};

/// Every i -> m -> n -> f route with nonzero couplings on all three hops.
/// The endpoints themselves are never intermediates. Throws
/// DegenerateDenominator naming the path when an intermediate is resonant with i.
std::vector<ChannelPath> enumerate_channels(const StateGraph& graph);

/// Omega_eff = -sum V_fn V_nm V_mi / ((E_i - E_m)(E_i - E_n)). An empty channel
/// list gives 0.
Complex omega_eff_complex(const StateGraph& graph);
/// Real part of omega_eff_complex; throws ConfigError if the imaginary part
/// exceeds 1e-12 of the magnitude.
double omega_eff(const StateGraph& graph);

/// Smallest |E_i - E_m| over the intermediates visited by any channel.
double min_detuning(const StateGraph& graph);

std::string path_label(const StateGraph& graph, const ChannelPath& path);

// --- Two atoms in one cavity mode.

/// H = omega a^dag a + omega_q (n_e1 + n_e2)
///     + g (a + a^dag) sum_j (cos(mixing) sigma_x^j + sin(mixing) sigma_z^j)
/// truncated at n_ph photons. The sigma_z part breaks parity; without it the
/// one-photon two-atom process is forbidden at every order.
struct RabiSystem {
    double omega = 1.0;
    double omega_q = 0.5;
    double g = 0.025;
    unsigned n_ph = 4;
    double mixing_angle = std::numbers::pi / 6.0;

    void validate() const;
};

struct RabiModel {
    Eigen::MatrixXd hamiltonian;
    StateGraph graph;  // bare product states, edges from off-diagonal elements
};

/// Basis index of |s1, s2, n> with s = 1 for an excited atom.
std::size_t rabi_index(unsigned s1, unsigned s2, unsigned n);
std::string rabi_label(unsigned s1, unsigned s2, unsigned n);

/// Initial node |g,g,1>, final node |e,e,0>.
RabiModel build_two_atom_rabi(const RabiSystem& sys);

/// The same Hamiltonian over exchange-symmetric atom states |g,g,n>, |S,n>,
/// |A,n>, |e,e,n> with S, A = (|e,g> +/- |g,e>)/sqrt2. A decouples, so the
/// product-basis routes pair up into one channel per atom-exchange class.
StateGraph symmetric_rabi_graph(const RabiSystem& sys);

/// Eigenvalue gap of the two dressed states with most weight on |g,g,1> and
/// |e,e,0>. Throws ConfigError when those states are not hybridized (system
/// detuned from the avoided crossing; see tune_resonance).
double exact_splitting(const Eigen::MatrixXd& hamiltonian, const RabiSystem& sys);

/// Shifts omega_q onto the dressed avoided crossing, where the gap between the
/// |g,g,1> / |e,e,0> doublet is minimal.
RabiSystem tune_resonance(const RabiSystem& sys);

struct SplittingComparison {
    RabiSystem tuned;
    double omega_eff = 0.0;       // perturbative, at the bare resonance
    double splitting = 0.0;       // exact, at the dressed resonance
    double relative_discrepancy;  // |splitting/2 - |omega_eff|| / |omega_eff|
    double detuning = 0.0;        // smallest intermediate detuning
};

/// Perturbative Omega_eff at omega_q = omega/2 against the exact splitting at
/// the tuned resonance.
SplittingComparison compare_with_exact(const RabiSystem& sys);

}  // namespace qoptics::cqed
