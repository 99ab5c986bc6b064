#include "qoptics/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "qoptics/errors.hpp"

namespace qoptics {

ModeRegistry::ModeRegistry(std::vector<std::string> labels) : labels_(std::move(labels)) {
    std::unordered_set<std::string_view> seen;
    for (const auto& l : labels_) {
        if (l.empty()) throw RegistryError("mode label must not be empty");
        if (!seen.insert(l).second) throw RegistryError("duplicate mode label '" + l + "'");
    }
}

std::optional<std::size_t> ModeRegistry::find(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t ModeRegistry::index(std::string_view label) const {
    if (auto i = find(label)) return *i;
    throw RegistryError("unregistered mode '" + std::string(label) + "'");
}

RegistryPtr make_registry(std::vector<std::string> labels) {
    return std::make_shared<const ModeRegistry>(std::move(labels));
}

unsigned FockTerm::total() const noexcept {
    return std::accumulate(occupations.begin(), occupations.end(), 0u);
}

FockTerm make_term(const ModeRegistry& registry,
                   const std::vector<std::pair<std::string, unsigned>>& counts) {
    FockTerm t(std::vector<unsigned>(registry.size(), 0));
    for (const auto& [label, n] : counts) t[registry.index(label)] = n;
    return t;
}

std::string describe(const FockTerm& term, const ModeRegistry& registry) {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < term.size(); ++i) {
        if (term[i] == 0) continue;
        if (!first) os << ' ';
        os << registry.label(i) << ':' << term[i];
        first = false;
    }
    return first ? std::string("vac") : os.str();
}

// ---------------------------------------------------------------------------

StateVector::Builder::Builder(RegistryPtr registry, double prune_threshold)
    : registry_(std::move(registry)), prune_(prune_threshold) {
    if (!registry_) throw RegistryError("state requires a mode registry");
}

StateVector::Builder& StateVector::Builder::add(const FockTerm& term, Complex amplitude) {
    return add(FockTerm(term), amplitude);
}

StateVector::Builder& StateVector::Builder::add(FockTerm&& term, Complex amplitude) {
    if (term.size() != registry_->size()) {
        throw RegistryError("term has " + std::to_string(term.size()) +
                            " occupations, registry has " + std::to_string(registry_->size()));
    }
    if (amplitude == Complex{}) return *this;
    terms_[std::move(term)] += amplitude;
    return *this;
}

StateVector StateVector::Builder::build() && {
    std::erase_if(terms_, [p = prune_](const auto& kv) { return std::abs(kv.second) < p; });
    StateVector out(std::move(registry_), prune_);
    out.terms_ = std::move(terms_);
    return out;
}

StateVector::StateVector(RegistryPtr registry, double prune_threshold)
    : registry_(std::move(registry)), prune_(prune_threshold) {
    if (!registry_) throw RegistryError("state requires a mode registry");
}

Complex StateVector::amplitude(const FockTerm& term) const {
    auto it = terms_.find(term);
    return it == terms_.end() ? Complex{} : it->second;
}

double StateVector::norm_squared() const {
    double s = 0.0;
    for (const auto& [t, a] : terms_) s += std::norm(a);
    return s;
}

double StateVector::norm() const { return std::sqrt(norm_squared()); }

unsigned StateVector::max_total() const {
    unsigned m = 0;
    for (const auto& [t, a] : terms_) m = std::max(m, t.total());
    return m;
}

// ---------------------------------------------------------------------------

namespace {

void require_same_registry(const StateVector& a, const StateVector& b) {
    if (!(a.registry() == b.registry())) throw RegistryError("states live on different mode registries");
}

}  // namespace

StateVector vacuum(RegistryPtr registry) {
    if (!registry || registry->empty()) throw RegistryError("vacuum requires a non-empty registry");
    const auto n = registry->size();
    return basis_state(std::move(registry), FockTerm(std::vector<unsigned>(n, 0)));
}

StateVector basis_state(RegistryPtr registry, FockTerm term, Complex amplitude) {
    StateVector::Builder b(std::move(registry));
    b.add(std::move(term), amplitude);
    return std::move(b).build();
}

StateVector add_term(const StateVector& state, const FockTerm& term, Complex amplitude) {
    StateVector::Builder b(state.registry_ptr(), state.prune_threshold());
    for (const auto& [t, a] : state.terms()) b.add(t, a);
    b.add(term, amplitude);
    return std::move(b).build();
}

StateVector superpose(Complex alpha, const StateVector& x, Complex beta, const StateVector& y) {
    require_same_registry(x, y);
    StateVector::Builder b(x.registry_ptr(), std::min(x.prune_threshold(), y.prune_threshold()));
    for (const auto& [t, a] : x.terms()) b.add(t, alpha * a);
    for (const auto& [t, a] : y.terms()) b.add(t, beta * a);
    return std::move(b).build();
}

StateVector scale(const StateVector& state, Complex factor) {
    StateVector::Builder b(state.registry_ptr(), state.prune_threshold());
    for (const auto& [t, a] : state.terms()) b.add(t, factor * a);
    return std::move(b).build();
}

StateVector tensor(const StateVector& a, const StateVector& b) {
    std::vector<std::string> labels = a.registry().labels();
    for (const auto& l : b.registry().labels()) {
        if (a.registry().contains(l)) throw RegistryError("tensor: mode '" + l + "' appears in both factors");
        labels.push_back(l);
    }
    StateVector::Builder out(make_registry(std::move(labels)),
                             std::min(a.prune_threshold(), b.prune_threshold()));
    for (const auto& [ta, xa] : a.terms()) {
        for (const auto& [tb, xb] : b.terms()) {
            std::vector<unsigned> occ = ta.occupations;
            occ.insert(occ.end(), tb.occupations.begin(), tb.occupations.end());
            out.add(FockTerm(std::move(occ)), xa * xb);
        }
    }
    return std::move(out).build();
}

Complex inner_product(const StateVector& a, const StateVector& b) {
    require_same_registry(a, b);
    Complex s{};
    for (const auto& [t, x] : a.terms()) s += std::conj(x) * b.amplitude(t);
    return s;
}

StateVector truncate(const StateVector& state, unsigned max_total) {
    StateVector::Builder b(state.registry_ptr(), state.prune_threshold());
    for (const auto& [t, a] : state.terms()) {
        if (t.total() <= max_total) b.add(t, a);
    }
    return std::move(b).build();
}

StateVector embed(const StateVector& state, RegistryPtr target) {
    const auto& src = state.registry();
    std::vector<std::size_t> where(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) where[i] = target->index(src.label(i));
    StateVector::Builder b(target, state.prune_threshold());
    for (const auto& [t, a] : state.terms()) {
        std::vector<unsigned> occ(target->size(), 0);
        for (std::size_t i = 0; i < src.size(); ++i) occ[where[i]] = t[i];
        b.add(FockTerm(std::move(occ)), a);
    }
    return std::move(b).build();
}

}  // namespace qoptics
