#pragma once

// Legacy-ASCII VTK structured-points snapshots of the occupancy grid.

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "cell_type.hpp"
#include "error.hpp"
#include "number_format.hpp"
#include "sim.hpp"

namespace cryptsim {

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io", what) {}
};

/// Voxel value for interior (non-crypt) positions.
inline constexpr int kInteriorCode = 255;

/// Voxels run x fastest, then y, then z; one line per x-row.
inline void write_snapshot(std::ostream& os, const SimState& state) {
    const auto& g = state.geometry();
    const auto& topo = state.grid.topology();
    os << "# vtk DataFile Version 3.0\n";
    os << "colonic crypt occupancy t=" << format_number(state.time) << "\n";
    os << "ASCII\n";
    os << "DATASET STRUCTURED_POINTS\n";
    os << "DIMENSIONS " << g.width << ' ' << g.height << ' ' << g.depth << '\n';
    os << "ORIGIN 0 0 0\n";
    os << "SPACING 1 1 1\n";
    os << "POINT_DATA " << g.box_site_count() << '\n';
    os << "SCALARS cell_type unsigned_char 1\n";
    os << "LOOKUP_TABLE default\n";
    for (int i = 0; i < g.box_site_count(); ++i) {
        const int code = topo.is_shell(i) ? voxel_code(state.grid[i]) : kInteriorCode;
        os << code << ((i + 1) % g.width == 0 ? '\n' : ' ');
    }
}

inline void write_snapshot(const SimState& state, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_snapshot(out, state);
    if (!out) throw IoError("write to '" + path + "' failed");
}

/// Top-down view of one layer: rows are z, columns x. Shell sites show their
/// voxel code, interior positions '.'.
inline std::string format_slice(const SimState& state, int y) {
    const auto& g = state.geometry();
    if (y < 0 || y >= g.height) throw OutOfBounds("layer " + std::to_string(y) + " outside [0, height)");
    std::ostringstream os;
    os << "y=" << y << " (" << to_string(layer_class(g, y)) << ")\n";
    for (int z = 0; z < g.depth; ++z) {
        for (int x = 0; x < g.width; ++x) {
            if (x) os << ' ';
            if (on_perimeter(g, x, z))
                os << static_cast<int>(voxel_code(state.grid.at({x, y, z})));
            else
                os << '.';
        }
        os << '\n';
    }
    return os.str();
}

} // namespace cryptsim
