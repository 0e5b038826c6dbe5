#include <gtest/gtest.h>

#include <set>

#include "cryptsim/geometry.hpp"
#include "cryptsim/occupancy.hpp"
#include "support/oracles.hpp"

using namespace cryptsim;

TEST(Geometry, ConstructionConstraints) {
    EXPECT_NO_THROW(make_geometry(3, 4, 3));
    EXPECT_THROW(make_geometry(2, 10, 4), InvalidGeometry);
    EXPECT_THROW(make_geometry(4, 10, 2), InvalidGeometry);
    EXPECT_THROW(make_geometry(4, 3, 4), InvalidGeometry);
    EXPECT_THROW(make_geometry(4, 10, 4, 0), InvalidGeometry);
    EXPECT_THROW(make_geometry(4, 10, 4, 9), InvalidGeometry);
    EXPECT_THROW(make_geometry(4, 10, 4, 5), InvalidGeometry); // above floor(9/2)
    EXPECT_EQ(make_geometry(4, 10, 4).source_layer_y, 3);
    EXPECT_EQ(make_geometry(4, 10, 4), CryptGeometry{});
}

TEST(ShellMembership, Examples) {
    const auto g = make_geometry(4, 10, 4);
    EXPECT_TRUE(shell_membership(g, {0, 5, 0}));
    EXPECT_FALSE(shell_membership(g, {1, 5, 1}));
    EXPECT_FALSE(shell_membership(g, {4, 5, 0}));
    EXPECT_FALSE(shell_membership(g, {0, -1, 0}));
}

TEST(EnumerateShellSites, DefaultAndSmallest) {
    const auto g = make_geometry(4, 10, 4);
    EXPECT_EQ(enumerate_shell_sites(g).size(), oracle::scan_shell(g).size());
    EXPECT_EQ(oracle::scan_shell(g).size(), 120u);
    const auto small = make_geometry(3, 4, 3);
    EXPECT_EQ(oracle::scan_shell(small).size(), 32u);
    EXPECT_EQ(enumerate_shell_sites(small).size(), 32u);
}

TEST(EnumerateShellSites, RowMajorRingOrderWithoutDuplicates) {
    const auto g = make_geometry(5, 6, 4);
    const auto sites = enumerate_shell_sites(g);
    std::set<SiteCoord> unique(sites.begin(), sites.end());
    EXPECT_EQ(unique.size(), sites.size());
    for (std::size_t i = 1; i < sites.size(); ++i) EXPECT_LE(sites[i - 1].y, sites[i].y);
    // Consecutive ring entries within a layer touch each other.
    const auto ring = perimeter_ring(g, 2);
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const auto& a = ring[i];
        const auto& b = ring[(i + 1) % ring.size()];
        EXPECT_EQ(std::abs(a.x - b.x) + std::abs(a.z - b.z), 1);
    }
}

TEST(EnumerateShellSites, MatchesClosedFormAndScanOverRange) {
    for (int w = 3; w <= 8; ++w)
        for (int d = 3; d <= 8; ++d)
            for (int h = 4; h <= 12; ++h) {
                const auto g = make_geometry(w, h, d);
                const auto sites = enumerate_shell_sites(g);
                ASSERT_EQ(static_cast<long>(sites.size()), oracle::closed_form_shell_count(g));
                const std::set<SiteCoord> a(sites.begin(), sites.end());
                const auto scanned = oracle::scan_shell(g);
                ASSERT_EQ(a, std::set<SiteCoord>(scanned.begin(), scanned.end()));
                for (const auto& s : sites) ASSERT_TRUE(s.x == 0 || s.x == w - 1 || s.z == 0 || s.z == d - 1);
            }
}

TEST(LateralNeighbors, CornerSiteMatchesScan) {
    const auto g = make_geometry(4, 10, 4);
    const auto n = lateral_neighbors(g, {0, 5, 0});
    const std::set<SiteCoord> got(n.begin(), n.end());
    EXPECT_EQ(got, oracle::scan_neighbors(g, {0, 5, 0}));
    // Two same-layer perimeter neighbors (the diagonal (1,5,1) is interior) plus both vertical ones.
    const std::set<SiteCoord> expected{{1, 5, 0}, {0, 5, 1}, {0, 4, 0}, {0, 6, 0}};
    EXPECT_EQ(got, expected);
}

TEST(LateralNeighbors, BoundaryAndPrecondition) {
    const auto g = make_geometry(4, 10, 4);
    for (const auto& n : lateral_neighbors(g, {2, 0, 0})) EXPECT_GE(n.y, 0);
    const auto bottom = lateral_neighbors(g, {2, 0, 0});
    EXPECT_EQ(std::count_if(bottom.begin(), bottom.end(), [](auto& s) { return s.y != 0; }), 1);
    EXPECT_THROW(lateral_neighbors(g, {1, 5, 1}), NotInShell);
    EXPECT_THROW(lateral_neighbors(g, {0, 10, 0}), NotInShell);
}

TEST(LateralNeighbors, SymmetricInShellAndMatchesScanEverywhere) {
    for (auto g : {make_geometry(4, 10, 4), make_geometry(3, 5, 6), make_geometry(7, 6, 3)})
        for (const auto& a : enumerate_shell_sites(g)) {
            const auto na = lateral_neighbors(g, a);
            ASSERT_EQ(std::set<SiteCoord>(na.begin(), na.end()), oracle::scan_neighbors(g, a));
            for (const auto& b : na) {
                ASSERT_TRUE(shell_membership(g, b));
                const auto nb = lateral_neighbors(g, b);
                ASSERT_NE(std::find(nb.begin(), nb.end(), a), nb.end());
            }
        }
}

TEST(LateralNeighbors, ShellIsConnected) {
    for (int w = 3; w <= 8; ++w)
        for (int d = 3; d <= 8; ++d)
            for (int h = 4; h <= 12; h += 4) ASSERT_TRUE(oracle::shell_connected(make_geometry(w, h, d)));
}

TEST(LayerClass, Examples) {
    const auto g = make_geometry(4, 10, 4, 3);
    EXPECT_EQ(layer_class(g, 3), LayerClass::Source);
    EXPECT_EQ(layer_class(g, 0), LayerClass::SinkBottom);
    EXPECT_EQ(layer_class(g, 9), LayerClass::SinkTop);
    EXPECT_EQ(layer_class(g, 5), LayerClass::Ordinary);
    EXPECT_THROW(layer_class(g, 10), OutOfBounds);
    EXPECT_THROW(layer_class(g, -1), OutOfBounds);
}

TEST(Presets, SeededFillsSourceLayer) {
    const auto g = make_geometry(4, 10, 4);
    const auto occ = preset_occupancy(g, "seeded");
    int stems = 0;
    for (const auto& [site, t] : occ)
        if (t == CellType::Stem) {
            ++stems;
            EXPECT_EQ(site.y, 3);
        }
    EXPECT_EQ(stems, 12);
    EXPECT_THROW(preset_occupancy(g, "full"), UnknownPreset);
}
