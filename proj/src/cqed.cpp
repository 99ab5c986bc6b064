#include "qoptics/cqed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "qoptics/errors.hpp"

namespace qoptics::cqed {

std::size_t StateGraph::add_node(std::string label, double energy) {
    for (const auto& n : nodes_) {
        if (n.label == label) throw ConfigError("duplicate graph node '" + label + "'");
    }
    if (!std::isfinite(energy)) throw ConfigError("node '" + label + "' has a non-finite energy");
    nodes_.push_back({std::move(label), energy});
    adjacency_.emplace_back();
    return nodes_.size() - 1;
}

std::size_t StateGraph::index(const std::string& label) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].label == label) return i;
    }
    throw ConfigError("unknown graph node '" + label + "'");
}

void StateGraph::add_coupling(const std::string& from, const std::string& to, Complex v) {
    add_coupling(index(from), index(to), v);
}

void StateGraph::add_coupling(std::size_t from, std::size_t to, Complex v) {
    if (from >= nodes_.size() || to >= nodes_.size()) throw ConfigError("coupling references a missing node");
    if (from == to) throw ConfigError("self-coupling on '" + nodes_[from].label + "' is a diagonal energy, not an edge");
    if (v == Complex{}) return;
    couplings_[{to, from}] = v;
    couplings_[{from, to}] = std::conj(v);
    auto link = [](std::vector<std::size_t>& adj, std::size_t k) {
        auto it = std::lower_bound(adj.begin(), adj.end(), k);
        if (it == adj.end() || *it != k) adj.insert(it, k);
    };
    link(adjacency_[from], to);
    link(adjacency_[to], from);
}

void StateGraph::set_endpoints(const std::string& initial, const std::string& final_state) {
    const std::size_t i = index(initial), f = index(final_state);
    if (i == f) throw ConfigError("initial and final node must differ");
    initial_ = i;
    final_ = f;
}

Complex StateGraph::coupling(std::size_t to, std::size_t from) const {
    auto it = couplings_.find({to, from});
    return it == couplings_.end() ? Complex{} : it->second;
}

std::size_t StateGraph::initial() const {
    if (!initial_) throw ConfigError("graph has no initial node");
    return *initial_;
}

std::size_t StateGraph::final_state() const {
    if (!final_) throw ConfigError("graph has no final node");
    return *final_;
}

double StateGraph::energy_scale() const {
    double m = 0.0;
    for (const auto& n : nodes_) m = std::max(m, std::abs(n.energy));
    return m;
}

void StateGraph::validate() const {
    for (const auto& [key, v] : couplings_) {
        if (std::abs(coupling(key.second, key.first) - std::conj(v)) > 1e-14 * std::abs(v)) {
            throw ConfigError("couplings are not Hermitian");
        }
    }
    const double ei = nodes_[initial()].energy, ef = nodes_[final_state()].energy;
    if (std::abs(ei - ef) > kDegeneracyTolerance * std::max(energy_scale(), 1e-300)) {
        std::ostringstream os;
        os << "initial and final energies differ (" << ei << " vs " << ef
           << "); the effective coupling needs E_i = E_f";
        throw ConfigError(os.str());
    }
}

std::string path_label(const StateGraph& graph, const ChannelPath& path) {
    std::string s;
    for (std::size_t k = 0; k < path.nodes.size(); ++k) {
        if (k) s += " -> ";
        s += graph.nodes()[path.nodes[k]].label;
    }
    return s;
}

std::vector<ChannelPath> enumerate_channels(const StateGraph& graph) {
    graph.validate();
    const std::size_t i = graph.initial(), f = graph.final_state();
    const double ei = graph.nodes()[i].energy;
    const double tol = kDegeneracyTolerance * graph.energy_scale();

    std::vector<ChannelPath> paths;
    for (std::size_t m : graph.neighbours(i)) {
        if (m == i || m == f) continue;
        for (std::size_t n : graph.neighbours(m)) {
            if (n == i || n == f) continue;
            const Complex v_fn = graph.coupling(f, n);
            if (v_fn == Complex{}) continue;
            ChannelPath p;
            p.nodes = {i, m, n, f};
            const double dm = ei - graph.nodes()[m].energy, dn = ei - graph.nodes()[n].energy;
            if (std::abs(dm) <= tol || std::abs(dn) <= tol) {
                throw DegenerateDenominator("channel " + path_label(graph, p) +
                                            " passes through a state resonant with the initial state");
            }
            p.numerator = v_fn * graph.coupling(n, m) * graph.coupling(m, i);
            p.denominator = dm * dn;
            p.term = -p.numerator / p.denominator;
            paths.push_back(p);
        }
    }
    return paths;
}

Complex omega_eff_complex(const StateGraph& graph) {
    Complex s{};
    for (const auto& p : enumerate_channels(graph)) s += p.term;
    return s;
}

double omega_eff(const StateGraph& graph) {
    const Complex w = omega_eff_complex(graph);
    if (std::abs(w.imag()) > 1e-12 * std::abs(w)) {
        throw ConfigError("effective coupling has a significant imaginary part; use omega_eff_complex");
    }
    return w.real();
}

double min_detuning(const StateGraph& graph) {
    const double ei = graph.nodes()[graph.initial()].energy;
    double d = std::numeric_limits<double>::infinity();
    for (const auto& p : enumerate_channels(graph)) {
        d = std::min({d, std::abs(ei - graph.nodes()[p.nodes[1]].energy), std::abs(ei - graph.nodes()[p.nodes[2]].energy)});
    }
    return d;
}

// ---------------------------------------------------------------------------

void RabiSystem::validate() const {
    if (!(omega > 0.0) || !(omega_q > 0.0)) throw ConfigError("photon and atom energies must be positive");
    if (!(g >= 0.0) || !std::isfinite(g)) throw ConfigError("coupling g must be >= 0");
    if (n_ph < 2) {
        throw ConfigError("photon truncation n_ph = " + std::to_string(n_ph) +
                          " cannot hold the two-photon virtual states; need n_ph >= 2");
    }
}

std::size_t rabi_index(unsigned s1, unsigned s2, unsigned n) { return 4 * n + 2 * s1 + s2; }

std::string rabi_label(unsigned s1, unsigned s2, unsigned n) {
    std::string s = "|";
    s += s1 ? 'e' : 'g';
    s += ',';
    s += s2 ? 'e' : 'g';
    s += ',' + std::to_string(n) + '>';
    return s;
}

RabiModel build_two_atom_rabi(const RabiSystem& sys) {
    sys.validate();
    const std::size_t dim = 4 * (sys.n_ph + 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    const double gx = sys.g * std::cos(sys.mixing_angle), gz = sys.g * std::sin(sys.mixing_angle);

    for (unsigned n = 0; n <= sys.n_ph; ++n) {
        for (unsigned s1 = 0; s1 < 2; ++s1) {
            for (unsigned s2 = 0; s2 < 2; ++s2) {
                const std::size_t k = rabi_index(s1, s2, n);
                h(k, k) = sys.omega * n + sys.omega_q * (s1 + s2);
                if (n == sys.n_ph) continue;
                // (a + a^dag) connects n and n+1 with sqrt(n+1).
                const double x = std::sqrt(static_cast<double>(n + 1));
                const double sz = (s1 ? 1.0 : -1.0) + (s2 ? 1.0 : -1.0);
                const std::size_t up = rabi_index(s1, s2, n + 1);
                h(k, up) += gz * sz * x;
                h(up, k) += gz * sz * x;
                const std::size_t flip1 = rabi_index(1 - s1, s2, n + 1);
                const std::size_t flip2 = rabi_index(s1, 1 - s2, n + 1);
                h(k, flip1) += gx * x;
                h(flip1, k) += gx * x;
                h(k, flip2) += gx * x;
                h(flip2, k) += gx * x;
            }
        }
    }

    StateGraph graph;
    for (unsigned n = 0; n <= sys.n_ph; ++n) {
        for (unsigned s1 = 0; s1 < 2; ++s1) {
            for (unsigned s2 = 0; s2 < 2; ++s2) graph.add_node(rabi_label(s1, s2, n), h(rabi_index(s1, s2, n), rabi_index(s1, s2, n)));
        }
    }
    // add_node order matches rabi_index.
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = r + 1; c < dim; ++c) {
            if (h(r, c) != 0.0) graph.add_coupling(c, r, h(r, c));
        }
    }
    graph.set_endpoints(rabi_label(0, 0, 1), rabi_label(1, 1, 0));
    return {std::move(h), std::move(graph)};
}

StateGraph symmetric_rabi_graph(const RabiSystem& sys) {
    const RabiModel model = build_two_atom_rabi(sys);
    const std::size_t dim = model.hamiltonian.rows();
    // Columns are the new basis vectors, ordered like rabi_index with slots
    // (gg, S, A, ee).
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(dim, dim);
    const double r = 1.0 / std::sqrt(2.0);
    static const char* const names[] = {"g,g", "S", "A", "e,e"};
    for (unsigned n = 0; n <= sys.n_ph; ++n) {
        const std::size_t base = 4 * n;
        u(rabi_index(0, 0, n), base) = 1.0;
        u(rabi_index(1, 0, n), base + 1) = r;
        u(rabi_index(0, 1, n), base + 1) = r;
        u(rabi_index(1, 0, n), base + 2) = r;
        u(rabi_index(0, 1, n), base + 2) = -r;
        u(rabi_index(1, 1, n), base + 3) = 1.0;
    }
    const Eigen::MatrixXd h = u.transpose() * model.hamiltonian * u;
    const double cutoff = 1e-14 * h.norm();

    StateGraph graph;
    for (unsigned n = 0; n <= sys.n_ph; ++n) {
        for (std::size_t k = 0; k < 4; ++k) {
            graph.add_node("|" + std::string(names[k]) + "," + std::to_string(n) + ">", h(4 * n + k, 4 * n + k));
        }
    }
    for (std::size_t a = 0; a < dim; ++a) {
        for (std::size_t b = a + 1; b < dim; ++b) {
            if (std::abs(h(a, b)) > cutoff) graph.add_coupling(b, a, h(a, b));
        }
    }
    graph.set_endpoints("|g,g,1>", "|e,e,0>");
    return graph;
}

namespace {

struct Doublet {
    double gap;
    double hybridization;  // min over the pair of the smaller endpoint share
};

Doublet doublet(const Eigen::MatrixXd& h) {
    const std::size_t i = rabi_index(0, 0, 1), f = rabi_index(1, 1, 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw Error("eigen decomposition failed");
    const auto& vec = es.eigenvectors();
    std::vector<std::pair<double, Eigen::Index>> weight;
    for (Eigen::Index k = 0; k < vec.cols(); ++k) {
        weight.emplace_back(vec(i, k) * vec(i, k) + vec(f, k) * vec(f, k), k);
    }
    std::partial_sort(weight.begin(), weight.begin() + 2, weight.end(), std::greater<>());
    const Eigen::Index a = weight[0].second, b = weight[1].second;
    double hyb = 1.0;
    for (Eigen::Index k : {a, b}) {
        const double wi = vec(i, k) * vec(i, k), wf = vec(f, k) * vec(f, k);
        hyb = std::min(hyb, std::min(wi, wf) / (wi + wf));
    }
    return {std::abs(es.eigenvalues()(a) - es.eigenvalues()(b)), hyb};
}

}  // namespace

double exact_splitting(const Eigen::MatrixXd& hamiltonian, const RabiSystem& sys) {
    if (hamiltonian.rows() != static_cast<Eigen::Index>(4 * (sys.n_ph + 1)) || hamiltonian.cols() != hamiltonian.rows()) {
        throw ConfigError("Hamiltonian dimension does not match the photon truncation");
    }
    if ((hamiltonian - hamiltonian.transpose()).norm() > 1e-12 * hamiltonian.norm()) {
        throw ConfigError("Hamiltonian is not Hermitian");
    }
    const Doublet d = doublet(hamiltonian);
    if (d.gap <= 1e-14 * std::max(sys.omega, sys.omega_q)) return 0.0;
    if (d.hybridization < 0.25) {
        std::ostringstream os;
        os << "|g,g,1> and |e,e,0> are not hybridized (minority share " << d.hybridization
           << "); the system is detuned from the avoided crossing, tune omega_q with tune_resonance first";
        throw ConfigError(os.str());
    }
    return d.gap;
}

RabiSystem tune_resonance(const RabiSystem& sys) {
    sys.validate();
    auto gap_at = [&](double wq) {
        RabiSystem s = sys;
        s.omega_q = wq;
        return doublet(build_two_atom_rabi(s).hamiltonian).gap;
    };
    // Second-order shifts are O(g^2/omega); keep the window well inside the
    // spacing to other bare levels.
    const double centre = sys.omega / 2.0;
    const double window = std::min(0.1 * sys.omega, 50.0 * sys.g * sys.g / sys.omega + 1e-9 * sys.omega);
    const auto [x0, g0] = boost::math::tools::brent_find_minima(gap_at, centre - window, centre + window,
                                                                std::numeric_limits<double>::digits);
    RabiSystem tuned = sys;
    tuned.omega_q = x0;
    if (g0 == 0.0) return tuned;

    // Near the crossing gap^2 is quadratic in omega_q; refine on its vertex.
    const double h = std::max(g0, 1e-12 * sys.omega);
    const double fm = std::pow(gap_at(x0 - h), 2), f0 = g0 * g0, fp = std::pow(gap_at(x0 + h), 2);
    const double curvature = fm - 2.0 * f0 + fp;
    if (curvature > 0.0) {
        const double shift = 0.5 * h * (fm - fp) / curvature;
        if (std::abs(shift) < h) tuned.omega_q = x0 + shift;
    }
    return tuned;
}

SplittingComparison compare_with_exact(const RabiSystem& sys) {
    SplittingComparison out;
    RabiSystem bare_sys = sys;
    bare_sys.omega_q = sys.omega / 2.0;
    const RabiModel bare = build_two_atom_rabi(bare_sys);
    out.omega_eff = omega_eff(bare.graph);
    out.detuning = enumerate_channels(bare.graph).empty() ? 0.0 : min_detuning(bare.graph);
    out.tuned = tune_resonance(sys);
    out.splitting = exact_splitting(build_two_atom_rabi(out.tuned).hamiltonian, out.tuned);
    out.relative_discrepancy =
        out.omega_eff == 0.0 ? (out.splitting == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                             : std::abs(out.splitting / 2.0 - std::abs(out.omega_eff)) / std::abs(out.omega_eff);
    return out;
}

}  // namespace qoptics::cqed
