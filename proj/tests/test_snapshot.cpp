#include <gtest/gtest.h>

#include <sstream>

#include "cryptsim/snapshot.hpp"
#include "support/oracles.hpp"

using namespace cryptsim;

TEST(Snapshot, EmptyStateVoxelCounts) {
    SimParams p;
    const auto s = init_state(p, "empty");
    std::ostringstream os;
    write_snapshot(os, s);
    std::istringstream in(os.str());
    const auto vol = oracle::read_vtk(in);
    EXPECT_EQ(vol.values.size(), 160u);
    EXPECT_EQ(std::count(vol.values.begin(), vol.values.end(), 0), 120);
    EXPECT_EQ(std::count(vol.values.begin(), vol.values.end(), 255), 40);
}

TEST(Snapshot, RereadReproducesGrid) {
    SimParams p;
    p.t_max = 30;
    p.seed = 9;
    const auto r = run(p, "seeded");
    std::ostringstream os;
    write_snapshot(os, r.final_state);
    std::istringstream in(os.str());
    EXPECT_EQ(oracle::occupancy_from_vtk(oracle::read_vtk(in), p.geometry), r.final_state.grid.to_occupancy());

    std::ostringstream again;
    write_snapshot(again, run(p, "seeded").final_state);
    EXPECT_EQ(os.str(), again.str());
}

TEST(Snapshot, SliceViewOfSeededSourceLayer) {
    SimParams p;
    const auto slice = format_slice(init_state(p, "seeded"), 3);
    EXPECT_EQ(slice, "y=3 (Source)\n"
                     "1 1 1 1\n"
                     "1 . . 1\n"
                     "1 . . 1\n"
                     "1 1 1 1\n");
    EXPECT_THROW(format_slice(init_state(p, "seeded"), 10), OutOfBounds);
}

TEST(Snapshot, UnwritablePathIsIoError) {
    SimParams p;
    EXPECT_THROW(write_snapshot(init_state(p, "empty"), "/nonexistent-dir/x.vtk"), IoError);
}
