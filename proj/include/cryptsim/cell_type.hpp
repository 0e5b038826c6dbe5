#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace cryptsim {

/// Occupancy state of one lattice site: the eight cell species plus Empty.
/// The declaration order is the fixed species order used by every output
/// column and by the snapshot codes.
enum class CellType : std::uint8_t {
    Stem,
    Paneth,
    Ta1,
    Ta2a,
    Ta2b,
    Goblet,
    Enteroendocrine,
    Enterocyte,
    Empty,
};

inline constexpr std::size_t kCellTypeCount = 9;
inline constexpr std::size_t kSpeciesCount = 8;

inline constexpr std::array<CellType, kCellTypeCount> kAllCellTypes = {
    CellType::Stem,   CellType::Paneth,          CellType::Ta1,        CellType::Ta2a,  CellType::Ta2b,
    CellType::Goblet, CellType::Enteroendocrine, CellType::Enterocyte, CellType::Empty,
};

inline constexpr std::array<CellType, kSpeciesCount> kSpecies = {
    CellType::Stem, CellType::Paneth, CellType::Ta1,             CellType::Ta2a,
    CellType::Ta2b, CellType::Goblet, CellType::Enteroendocrine, CellType::Enterocyte,
};

constexpr std::size_t index_of(CellType t) noexcept { return static_cast<std::size_t>(t); }

/// Lower-case identifier, also used as the SBML species id and CSV column.
constexpr std::string_view to_id(CellType t) noexcept {
    switch (t) {
    case CellType::Stem: return "stem";
    case CellType::Paneth: return "paneth";
    case CellType::Ta1: return "ta1";
    case CellType::Ta2a: return "ta2a";
    case CellType::Ta2b: return "ta2b";
    case CellType::Goblet: return "goblet";
    case CellType::Enteroendocrine: return "enteroendocrine";
    case CellType::Enterocyte: return "enterocyte";
    case CellType::Empty: return "empty";
    }
    return "?";
}

constexpr std::string_view display_name(CellType t) noexcept {
    switch (t) {
    case CellType::Stem: return "Stem";
    case CellType::Paneth: return "Paneth";
    case CellType::Ta1: return "Ta1";
    case CellType::Ta2a: return "Ta2a";
    case CellType::Ta2b: return "Ta2b";
    case CellType::Goblet: return "Goblet";
    case CellType::Enteroendocrine: return "Enteroendocrine";
    case CellType::Enterocyte: return "Enterocyte";
    case CellType::Empty: return "Empty";
    }
    return "?";
}

inline std::optional<CellType> cell_type_from_id(std::string_view id) noexcept {
    for (CellType t : kAllCellTypes)
        if (to_id(t) == id) return t;
    return std::nullopt;
}

/// Fully differentiated types.
constexpr bool is_terminal(CellType t) noexcept {
    return t == CellType::Paneth || t == CellType::Goblet || t == CellType::Enteroendocrine ||
           t == CellType::Enterocyte;
}

/// Partially differentiated (transit-amplifying) types.
constexpr bool is_partial(CellType t) noexcept {
    return t == CellType::Ta1 || t == CellType::Ta2a || t == CellType::Ta2b;
}

/// Snapshot voxel code: 0 for Empty, 1..8 for the species in declaration order.
constexpr std::uint8_t voxel_code(CellType t) noexcept {
    return t == CellType::Empty ? 0 : static_cast<std::uint8_t>(index_of(t) + 1);
}

inline std::optional<CellType> cell_type_from_code(int code) noexcept {
    if (code == 0) return CellType::Empty;
    if (code >= 1 && code <= 8) return kSpecies[static_cast<std::size_t>(code - 1)];
    return std::nullopt;
}

using Populations = std::array<long, kCellTypeCount>;

} // namespace cryptsim
