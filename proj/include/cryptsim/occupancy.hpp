#pragma once

#include <map>
#include <string>

#include "cell_type.hpp"
#include "error.hpp"
#include "geometry.hpp"

namespace cryptsim {

/// Cell type per shell site.
using Occupancy = std::map<SiteCoord, CellType>;

class IncompleteInit : public Error {
public:
    explicit IncompleteInit(const std::string& what) : Error("incomplete_init", what) {}
};

class UnknownPreset : public Error {
public:
    explicit UnknownPreset(const std::string& name) : Error("unknown_preset", "unknown preset '" + name + "'") {}
};

/// Throws IncompleteInit unless `occ` covers exactly the shell sites.
inline void check_occupancy(const CryptGeometry& g, const Occupancy& occ) {
    for (const auto& [site, type] : occ)
        if (!shell_membership(g, site)) throw IncompleteInit("site " + to_string(site) + " is not a shell site");
    for (const auto& site : enumerate_shell_sites(g))
        if (!occ.contains(site)) throw IncompleteInit("shell site " + to_string(site) + " has no assigned type");
}

inline Occupancy uniform_occupancy(const CryptGeometry& g, CellType t) {
    Occupancy occ;
    for (const auto& site : enumerate_shell_sites(g)) occ.emplace(site, t);
    return occ;
}

/// Preset with `count` Stem cells placed in ring order starting at the
/// source layer and continuing upward, never into the top sink.
inline Occupancy stem_fill_occupancy(const CryptGeometry& g, long count) {
    Occupancy occ = uniform_occupancy(g, CellType::Empty);
    for (int y = g.source_layer_y; y < g.sink_top_y() && count > 0; ++y)
        for (const auto& site : perimeter_ring(g, y)) {
            if (count-- <= 0) break;
            occ[site] = CellType::Stem;
        }
    return occ;
}

/// "empty": every site Empty. "seeded": Stem cells filling the source layer.
inline Occupancy preset_occupancy(const CryptGeometry& g, const std::string& name) {
    if (name == "empty") return uniform_occupancy(g, CellType::Empty);
    if (name == "seeded") return stem_fill_occupancy(g, g.perimeter());
    throw UnknownPreset(name);
}

} // namespace cryptsim
