#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cell_type.hpp"
#include "error.hpp"

namespace cryptsim {

enum class ReactionKind { Differentiation, Duplication, Degradation };

constexpr std::string_view to_string(ReactionKind k) noexcept {
    switch (k) {
    case ReactionKind::Differentiation: return "differentiation";
    case ReactionKind::Duplication: return "duplication";
    case ReactionKind::Degradation: return "degradation";
    }
    return "?";
}

struct Reaction {
    std::string name;
    ReactionKind kind = ReactionKind::Differentiation;
    CellType reactant = CellType::Stem;
    std::optional<CellType> product; // absent for degradation
    double rate = 1.0;               // 1/time

    friend bool operator==(const Reaction&, const Reaction&) = default;
};

class NegativeRate : public Error {
public:
    explicit NegativeRate(const std::string& name, double rate)
        : Error("negative_rate", "rate for '" + name + "' is negative: " + std::to_string(rate)) {}
};

class UnknownReactionName : public Error {
public:
    explicit UnknownReactionName(const std::string& name)
        : Error("unknown_reaction_name", "unknown reaction name '" + name + "'") {}
};

/// Ordered list of reactions. Immutable once built; share freely.
class ReactionNetwork {
public:
    ReactionNetwork() = default;
    explicit ReactionNetwork(std::vector<Reaction> reactions) : reactions_(std::move(reactions)) {}

    const std::vector<Reaction>& reactions() const noexcept { return reactions_; }
    std::size_t size() const noexcept { return reactions_.size(); }
    const Reaction& operator[](std::size_t i) const { return reactions_[i]; }

    std::optional<std::size_t> find(std::string_view name) const {
        for (std::size_t i = 0; i < reactions_.size(); ++i)
            if (reactions_[i].name == name) return i;
        return std::nullopt;
    }

    /// Copy with one reaction's rate replaced.
    ReactionNetwork with_rate(std::string_view name, double rate) const {
        auto idx = find(name);
        if (!idx) throw UnknownReactionName(std::string(name));
        if (rate < 0) throw NegativeRate(std::string(name), rate);
        auto copy = reactions_;
        copy[*idx].rate = rate;
        return ReactionNetwork(std::move(copy));
    }

    friend bool operator==(const ReactionNetwork&, const ReactionNetwork&) = default;

private:
    std::vector<Reaction> reactions_;
};

inline constexpr std::size_t kCanonicalReactionCount = 12;

/// The canonical edge list. The differentiation topology is a reconstruction
/// from the published counts (7 differentiations, 1 duplication, 4
/// degradations); any other topology can be loaded from an SBML document.
inline const std::array<Reaction, kCanonicalReactionCount>& canonical_reactions() {
    using CT = CellType;
    using RK = ReactionKind;
    static const std::array<Reaction, kCanonicalReactionCount> table = {{
        {"stem_duplication", RK::Duplication, CT::Stem, CT::Stem, 1.0},
        {"stem_to_paneth", RK::Differentiation, CT::Stem, CT::Paneth, 1.0},
        {"stem_to_ta1", RK::Differentiation, CT::Stem, CT::Ta1, 1.0},
        {"ta1_to_ta2a", RK::Differentiation, CT::Ta1, CT::Ta2a, 1.0},
        {"ta1_to_ta2b", RK::Differentiation, CT::Ta1, CT::Ta2b, 1.0},
        {"ta2a_to_goblet", RK::Differentiation, CT::Ta2a, CT::Goblet, 1.0},
        {"ta2a_to_enteroendocrine", RK::Differentiation, CT::Ta2a, CT::Enteroendocrine, 1.0},
        {"ta2b_to_enterocyte", RK::Differentiation, CT::Ta2b, CT::Enterocyte, 1.0},
        {"deg_paneth", RK::Degradation, CT::Paneth, std::nullopt, 1.0},
        {"deg_goblet", RK::Degradation, CT::Goblet, std::nullopt, 1.0},
        {"deg_enteroendocrine", RK::Degradation, CT::Enteroendocrine, std::nullopt, 1.0},
        {"deg_enterocyte", RK::Degradation, CT::Enterocyte, std::nullopt, 1.0},
    }};
    return table;
}

inline bool is_canonical_reaction_name(std::string_view name) {
    const auto& table = canonical_reactions();
    return std::any_of(table.begin(), table.end(), [&](const Reaction& r) { return r.name == name; });
}

/// Builds the canonical 12-reaction network. Names missing from `rates`
/// default to 1.0.
inline ReactionNetwork build_default_network(const std::map<std::string, double>& rates = {}) {
    for (const auto& [name, rate] : rates) {
        if (!is_canonical_reaction_name(name)) throw UnknownReactionName(name);
        if (rate < 0) throw NegativeRate(name, rate);
    }
    std::vector<Reaction> out(canonical_reactions().begin(), canonical_reactions().end());
    for (auto& r : out)
        if (auto it = rates.find(r.name); it != rates.end()) r.rate = it->second;
    return ReactionNetwork(std::move(out));
}

namespace detail {

inline bool differentiation_graph_is_acyclic(const ReactionNetwork& net) {
    // Kahn's algorithm over the 9 cell states.
    std::array<int, kCellTypeCount> indegree{};
    std::vector<std::pair<CellType, CellType>> edges;
    for (const auto& r : net.reactions())
        if (r.kind == ReactionKind::Differentiation && r.product) {
            edges.emplace_back(r.reactant, *r.product);
            ++indegree[index_of(*r.product)];
        }
    std::vector<CellType> ready;
    for (CellType t : kAllCellTypes)
        if (indegree[index_of(t)] == 0) ready.push_back(t);
    std::size_t removed = 0;
    while (!ready.empty()) {
        CellType t = ready.back();
        ready.pop_back();
        for (const auto& [from, to] : edges)
            if (from == t && --indegree[index_of(to)] == 0) {
                ready.push_back(to);
            }
        ++removed;
    }
    return removed == kCellTypeCount;
}

inline std::array<bool, kCellTypeCount> reachable_from_stem(const ReactionNetwork& net) {
    std::array<bool, kCellTypeCount> seen{};
    std::vector<CellType> stack{CellType::Stem};
    seen[index_of(CellType::Stem)] = true;
    while (!stack.empty()) {
        CellType t = stack.back();
        stack.pop_back();
        for (const auto& r : net.reactions())
            if (r.kind == ReactionKind::Differentiation && r.reactant == t && r.product &&
                !seen[index_of(*r.product)]) {
                seen[index_of(*r.product)] = true;
                stack.push_back(*r.product);
            }
    }
    return seen;
}

} // namespace detail

/// Lists every violated network invariant. Violation codes:
/// reaction_count, kind_split, invalid_differentiation, invalid_duplication,
/// invalid_degradation, negative_rate, duplicate_name, cycle,
/// unreachable_terminal, missing_degradation, duplicate_degradation.
inline ValidationReport validate_network(const ReactionNetwork& net) {
    ValidationReport report;
    const auto& rs = net.reactions();

    if (rs.size() != kCanonicalReactionCount)
        report.add("reaction_count", std::to_string(rs.size()) + " reactions != 12 expected");

    std::array<int, 3> by_kind{};
    for (const auto& r : rs) ++by_kind[static_cast<std::size_t>(r.kind)];
    if (by_kind[0] != 7 || by_kind[1] != 1 || by_kind[2] != 4)
        report.add("kind_split", "kind split " + std::to_string(by_kind[0]) + "/" + std::to_string(by_kind[1]) +
                                     "/" + std::to_string(by_kind[2]) + " != 7/1/4");

    std::vector<std::string> names;
    for (const auto& r : rs) {
        if (std::find(names.begin(), names.end(), r.name) != names.end())
            report.add("duplicate_name", "reaction name '" + r.name + "' appears more than once");
        names.push_back(r.name);

        if (r.rate < 0) report.add("negative_rate", "reaction '" + r.name + "' has negative rate");

        switch (r.kind) {
        case ReactionKind::Differentiation:
            if (!r.product || *r.product == r.reactant || r.reactant == CellType::Empty ||
                *r.product == CellType::Empty)
                report.add("invalid_differentiation",
                           "differentiation '" + r.name + "' must map one non-Empty type to a different one");
            break;
        case ReactionKind::Duplication:
            if (r.reactant != CellType::Stem || r.product != CellType::Stem)
                report.add("invalid_duplication", "duplication '" + r.name + "' must be Stem -> Stem");
            break;
        case ReactionKind::Degradation:
            if (!is_terminal(r.reactant) || r.product)
                report.add("invalid_degradation",
                           "degradation '" + r.name + "' must consume a terminal type with no product");
            break;
        }
    }

    if (!detail::differentiation_graph_is_acyclic(net))
        report.add("cycle", "differentiation graph not acyclic from Stem");

    const auto reach = detail::reachable_from_stem(net);
    for (CellType t : kSpecies) {
        if (!is_terminal(t)) continue;
        if (!reach[index_of(t)])
            report.add("unreachable_terminal",
                       "terminal type " + std::string(display_name(t)) + " not reachable from Stem");
        const auto n = std::count_if(rs.begin(), rs.end(), [t](const Reaction& r) {
            return r.kind == ReactionKind::Degradation && r.reactant == t;
        });
        if (n == 0)
            report.add("missing_degradation", "terminal type " + std::string(display_name(t)) + " lacks degradation");
        else if (n > 1)
            report.add("duplicate_degradation",
                       "terminal type " + std::string(display_name(t)) + " has more than one degradation");
    }
    return report;
}

struct ApplicableReaction {
    std::size_t index;
    double rate;

    friend bool operator==(const ApplicableReaction&, const ApplicableReaction&) = default;
};

/// Reactions whose reactant is `cell`, in network order.
inline std::vector<ApplicableReaction> applicable_reactions(CellType cell, const ReactionNetwork& net) {
    std::vector<ApplicableReaction> out;
    if (cell == CellType::Empty) return out;
    for (std::size_t i = 0; i < net.size(); ++i)
        if (net[i].reactant == cell) out.push_back({i, net[i].rate});
    return out;
}

} // namespace cryptsim
