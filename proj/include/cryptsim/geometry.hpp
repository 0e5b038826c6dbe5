#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"

namespace cryptsim {

class InvalidGeometry : public Error {
public:
    explicit InvalidGeometry(const std::string& what) : Error("invalid_geometry", what) {}
};

class NotInShell : public Error {
public:
    explicit NotInShell(const std::string& what) : Error("not_in_shell", what) {}
};

class OutOfBounds : public Error {
public:
    explicit OutOfBounds(const std::string& what) : Error("out_of_bounds", what) {}
};

struct SiteCoord {
    int x = 0;
    int y = 0;
    int z = 0;

    friend auto operator<=>(const SiteCoord&, const SiteCoord&) = default;
};

inline std::string to_string(const SiteCoord& c) {
    return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + "," + std::to_string(c.z) + ")";
}

/// Hollow parallelepiped in lattice units. x is width, y height, z depth.
/// Layers y = 0 and y = height-1 are absorbing sinks; `source_layer_y`
/// spawns new stem cells.
struct CryptGeometry {
    int width = 4;
    int height = 10;
    int depth = 4;
    int source_layer_y = 3;

    int sink_bottom_y() const noexcept { return 0; }
    int sink_top_y() const noexcept { return height - 1; }
    int perimeter() const noexcept { return 2 * width + 2 * depth - 4; }
    int shell_site_count() const noexcept { return height * perimeter(); }
    int box_site_count() const noexcept { return width * height * depth; }

    friend bool operator==(const CryptGeometry&, const CryptGeometry&) = default;
};

inline int default_source_layer(int height) noexcept { return height / 3; }

/// Empty string when valid, otherwise the first broken constraint.
inline std::string geometry_problem(const CryptGeometry& g) {
    if (g.width < 3) return "width must be >= 3";
    if (g.depth < 3) return "depth must be >= 3";
    if (g.height < 4) return "height must be >= 4";
    if (g.source_layer_y <= 0 || g.source_layer_y >= g.height - 1)
        return "source layer must lie strictly between the sink layers";
    if (g.source_layer_y > (g.height - 1) / 2) return "source layer must lie in the lower half";
    return {};
}

/// Validating constructor. The source layer defaults to floor(height/3).
inline CryptGeometry make_geometry(int width, int height, int depth, std::optional<int> source_layer_y = {}) {
    CryptGeometry g{width, height, depth, source_layer_y.value_or(default_source_layer(height))};
    if (auto problem = geometry_problem(g); !problem.empty()) throw InvalidGeometry(problem);
    return g;
}

inline bool in_bounds(const CryptGeometry& g, const SiteCoord& c) noexcept {
    return c.x >= 0 && c.x < g.width && c.y >= 0 && c.y < g.height && c.z >= 0 && c.z < g.depth;
}

/// True iff the column (x, z) lies on the perimeter of the cross-section.
inline bool on_perimeter(const CryptGeometry& g, int x, int z) noexcept {
    return x == 0 || x == g.width - 1 || z == 0 || z == g.depth - 1;
}

inline bool shell_membership(const CryptGeometry& g, const SiteCoord& c) noexcept {
    return in_bounds(g, c) && on_perimeter(g, c.x, c.z);
}

/// Perimeter columns of one layer walked as a ring: along z = 0 with x
/// increasing, up the x = W-1 wall, back along z = D-1, down the x = 0 wall.
inline std::vector<SiteCoord> perimeter_ring(const CryptGeometry& g, int y) {
    std::vector<SiteCoord> ring;
    ring.reserve(static_cast<std::size_t>(g.perimeter()));
    for (int x = 0; x < g.width; ++x) ring.push_back({x, y, 0});
    for (int z = 1; z < g.depth; ++z) ring.push_back({g.width - 1, y, z});
    for (int x = g.width - 2; x >= 0; --x) ring.push_back({x, y, g.depth - 1});
    for (int z = g.depth - 2; z >= 1; --z) ring.push_back({0, y, z});
    return ring;
}

/// All shell sites, layer by layer from y = 0, each layer in ring order.
inline std::vector<SiteCoord> enumerate_shell_sites(const CryptGeometry& g) {
    std::vector<SiteCoord> out;
    out.reserve(static_cast<std::size_t>(g.shell_site_count()));
    for (int y = 0; y < g.height; ++y) {
        auto ring = perimeter_ring(g, y);
        out.insert(out.end(), ring.begin(), ring.end());
    }
    return out;
}

/// Shell sites within Chebyshev distance 1 in the same layer (8-connected in
/// the cross-section), then the sites directly below and above.
inline std::vector<SiteCoord> lateral_neighbors(const CryptGeometry& g, const SiteCoord& c) {
    if (!shell_membership(g, c)) throw NotInShell(to_string(c) + " is not a shell site");
    std::vector<SiteCoord> out;
    for (int dz = -1; dz <= 1; ++dz)
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dz == 0) continue;
            SiteCoord n{c.x + dx, c.y, c.z + dz};
            if (shell_membership(g, n)) out.push_back(n);
        }
    if (c.y > 0) out.push_back({c.x, c.y - 1, c.z});
    if (c.y < g.height - 1) out.push_back({c.x, c.y + 1, c.z});
    return out;
}

enum class LayerClass { SinkBottom, Source, SinkTop, Ordinary };

inline const char* to_string(LayerClass c) noexcept {
    switch (c) {
    case LayerClass::SinkBottom: return "SinkBottom";
    case LayerClass::Source: return "Source";
    case LayerClass::SinkTop: return "SinkTop";
    case LayerClass::Ordinary: return "Ordinary";
    }
    return "?";
}

inline LayerClass layer_class(const CryptGeometry& g, int y) {
    if (y < 0 || y >= g.height) throw OutOfBounds("layer " + std::to_string(y) + " outside [0, height)");
    if (y == g.sink_bottom_y()) return LayerClass::SinkBottom;
    if (y == g.sink_top_y()) return LayerClass::SinkTop;
    if (y == g.source_layer_y) return LayerClass::Source;
    return LayerClass::Ordinary;
}

inline bool is_sink_layer(const CryptGeometry& g, int y) noexcept {
    return y == g.sink_bottom_y() || y == g.sink_top_y();
}

} // namespace cryptsim
