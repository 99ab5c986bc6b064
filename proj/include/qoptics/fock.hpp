#pragma once

#include <complex>
#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qoptics {

using Complex = std::complex<double>;

/// Amplitudes with magnitude below this are dropped from a StateVector.
inline constexpr double kPruneThreshold = 1e-15;

/// Ordered set of unique spatial-mode labels. Fixed after construction, so the
/// position of a label is a stable index into every occupation vector.
class ModeRegistry {
public:
    explicit ModeRegistry(std::vector<std::string> labels);

    std::size_t size() const noexcept { return labels_.size(); }
    bool empty() const noexcept { return labels_.empty(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::string& label(std::size_t i) const { return labels_.at(i); }

    std::optional<std::size_t> find(std::string_view label) const;
    /// Throws RegistryError for unknown labels.
    std::size_t index(std::string_view label) const;
    bool contains(std::string_view label) const { return find(label).has_value(); }

    bool operator==(const ModeRegistry& other) const { return labels_ == other.labels_; }

private:
    std::vector<std::string> labels_;
};

using RegistryPtr = std::shared_ptr<const ModeRegistry>;

RegistryPtr make_registry(std::vector<std::string> labels);

/// One occupation-number basis vector: photon count per registered mode.
struct FockTerm {
    std::vector<unsigned> occupations;

    FockTerm() = default;
    explicit FockTerm(std::vector<unsigned> occ) : occupations(std::move(occ)) {}

    std::size_t size() const noexcept { return occupations.size(); }
    unsigned operator[](std::size_t i) const { return occupations[i]; }
    unsigned& operator[](std::size_t i) { return occupations[i]; }
    unsigned total() const noexcept;

    auto operator<=>(const FockTerm&) const = default;
    bool operator==(const FockTerm&) const = default;
};

/// Builds a term from sparse `label -> count` pairs; unlisted modes are empty.
FockTerm make_term(const ModeRegistry& registry,
                   const std::vector<std::pair<std::string, unsigned>>& counts);

/// Compact rendering such as "a:1 e2:1 e3:1"; the vacuum renders as "vac".
std::string describe(const FockTerm& term, const ModeRegistry& registry);

/// Sparse superposition of Fock terms over one registry. Immutable once built;
/// every operation below returns a new value.
class StateVector {
public:
    using TermMap = std::map<FockTerm, Complex>;

    /// Accumulates amplitudes and prunes once at build(), so contributions that
    /// cancel exactly never survive.
    class Builder {
    public:
        explicit Builder(RegistryPtr registry, double prune_threshold = kPruneThreshold);
        /// Throws RegistryError on a length mismatch.
        Builder& add(const FockTerm& term, Complex amplitude);
        Builder& add(FockTerm&& term, Complex amplitude);
        const RegistryPtr& registry() const noexcept { return registry_; }
        StateVector build() &&;

    private:
        RegistryPtr registry_;
        double prune_;
        TermMap terms_;
    };

    /// The zero vector over `registry`.
    explicit StateVector(RegistryPtr registry, double prune_threshold = kPruneThreshold);

    const ModeRegistry& registry() const noexcept { return *registry_; }
    const RegistryPtr& registry_ptr() const noexcept { return registry_; }
    const TermMap& terms() const noexcept { return terms_; }
    double prune_threshold() const noexcept { return prune_; }

    std::size_t size() const noexcept { return terms_.size(); }
    bool empty() const noexcept { return terms_.empty(); }

    Complex amplitude(const FockTerm& term) const;
    double norm_squared() const;
    double norm() const;
    /// Largest total photon number over the stored terms (0 for the zero vector).
    unsigned max_total() const;

private:
    RegistryPtr registry_;
    double prune_;
    TermMap terms_;
};

StateVector vacuum(RegistryPtr registry);
StateVector basis_state(RegistryPtr registry, FockTerm term, Complex amplitude = 1.0);
StateVector add_term(const StateVector& state, const FockTerm& term, Complex amplitude);
/// alpha*x + beta*y over a shared registry.
StateVector superpose(Complex alpha, const StateVector& x, Complex beta, const StateVector& y);
StateVector scale(const StateVector& state, Complex factor);
/// Product state over the union registry (labels of `a` first). Mode sets must be disjoint.
StateVector tensor(const StateVector& a, const StateVector& b);
/// <a|b>, conjugate-linear in `a`.
Complex inner_product(const StateVector& a, const StateVector& b);
/// Drops terms carrying more than `max_total` photons. No renormalization.
StateVector truncate(const StateVector& state, unsigned max_total);

/// Re-expresses `state` over `target`, which must contain every label of the
/// state's registry; added modes are empty.
StateVector embed(const StateVector& state, RegistryPtr target);

}  // namespace qoptics
