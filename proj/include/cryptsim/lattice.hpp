#pragma once

#include <memory>
#include <span>
#include <vector>

#include "cell_type.hpp"
#include "geometry.hpp"
#include "occupancy.hpp"

namespace cryptsim {

/// Precomputed indexing for one geometry: shell mask, shell sites in
/// enumeration order, and lateral-neighbor lists in CSR form. Box indices
/// run x fastest, then y, then z.
class Topology {
public:
    explicit Topology(const CryptGeometry& g) : geometry_(g), shell_mask_(static_cast<std::size_t>(g.box_site_count())) {
        for (const auto& s : enumerate_shell_sites(g)) {
            const int i = index(s);
            shell_.push_back(i);
            shell_mask_[static_cast<std::size_t>(i)] = true;
        }
        offsets_.assign(static_cast<std::size_t>(g.box_site_count()) + 1, 0);
        for (int i = 0; i < g.box_site_count(); ++i) {
            if (shell_mask_[static_cast<std::size_t>(i)])
                for (const auto& n : lateral_neighbors(g, coord(i))) neighbors_.push_back(index(n));
            offsets_[static_cast<std::size_t>(i) + 1] = static_cast<int>(neighbors_.size());
        }
    }

    const CryptGeometry& geometry() const noexcept { return geometry_; }

    int index(const SiteCoord& c) const noexcept {
        return c.x + geometry_.width * (c.y + geometry_.height * c.z);
    }

    SiteCoord coord(int i) const noexcept {
        const int x = i % geometry_.width;
        const int rest = i / geometry_.width;
        return {x, rest % geometry_.height, rest / geometry_.height};
    }

    int y_of(int i) const noexcept { return (i / geometry_.width) % geometry_.height; }

    bool is_shell(int i) const noexcept { return shell_mask_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& shell() const noexcept { return shell_; }

    std::span<const int> neighbors(int i) const noexcept {
        const auto b = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(i)]);
        const auto e = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(i) + 1]);
        return std::span<const int>(neighbors_).subspan(b, e - b);
    }

    /// Index of the site one layer up (+1) or down (-1) in the same column.
    int vertical(int i, int dy) const noexcept { return i + dy * geometry_.width; }

private:
    CryptGeometry geometry_;
    std::vector<bool> shell_mask_;
    std::vector<int> shell_;
    std::vector<int> offsets_;
    std::vector<int> neighbors_;
};

/// Dense occupancy grid over the bounding box. Interior (non-shell) entries
/// exist only for indexing and stay Empty.
class Lattice {
public:
    explicit Lattice(const CryptGeometry& g)
        : topology_(std::make_shared<const Topology>(g)),
          cells_(static_cast<std::size_t>(g.box_site_count()), CellType::Empty) {}

    Lattice(const CryptGeometry& g, const Occupancy& occ) : Lattice(g) {
        check_occupancy(g, occ);
        for (const auto& [site, type] : occ) cells_[static_cast<std::size_t>(topology_->index(site))] = type;
    }

    const Topology& topology() const noexcept { return *topology_; }
    const CryptGeometry& geometry() const noexcept { return topology_->geometry(); }

    CellType operator[](int i) const noexcept { return cells_[static_cast<std::size_t>(i)]; }
    CellType at(const SiteCoord& c) const { return cells_.at(static_cast<std::size_t>(topology_->index(c))); }
    void set(int i, CellType t) noexcept { cells_[static_cast<std::size_t>(i)] = t; }

    std::span<const CellType> cells() const noexcept { return cells_; }

    /// Counts over shell sites, indexed by CellType.
    Populations populations() const noexcept {
        Populations p{};
        for (int i : topology_->shell()) ++p[index_of(cells_[static_cast<std::size_t>(i)])];
        return p;
    }

    Occupancy to_occupancy() const {
        Occupancy occ;
        for (int i : topology_->shell()) occ.emplace(topology_->coord(i), cells_[static_cast<std::size_t>(i)]);
        return occ;
    }

    friend bool operator==(const Lattice& a, const Lattice& b) {
        return a.geometry() == b.geometry() && a.cells_ == b.cells_;
    }

private:
    std::shared_ptr<const Topology> topology_;
    std::vector<CellType> cells_;
};

} // namespace cryptsim
