#include <gtest/gtest.h>

#include <sstream>

#include "cryptsim/analysis.hpp"

using namespace cryptsim;

namespace {

Trajectory series(const std::vector<std::pair<double, long>>& stem_counts, long total = 120) {
    Trajectory t;
    for (const auto& [time, n] : stem_counts) {
        Populations p{};
        p[index_of(CellType::Stem)] = n;
        p[index_of(CellType::Empty)] = total - n;
        t.times.push_back(time);
        t.populations.push_back(p);
    }
    return t;
}

SimParams small_params() {
    SimParams p;
    p.geometry = make_geometry(4, 10, 4);
    p.t_max = 20;
    p.record_interval = 1;
    p.seed = 5;
    return p;
}

} // namespace

TEST(Homeostasis, ConstantPopulationsAreStable) {
    const auto r = homeostasis_metrics(series({{0, 7}, {1, 7}, {2, 7}, {3, 7}}), 0.5, 1e-9);
    EXPECT_TRUE(r.stable);
    EXPECT_EQ(*r.stats[index_of(CellType::Stem)].cv, 0.0);
    EXPECT_FALSE(r.stats[index_of(CellType::Goblet)].cv.has_value());
    EXPECT_EQ(r.t_start, 2);
    EXPECT_EQ(r.t_end, 3);
}

TEST(Homeostasis, ExtinctionIsUnstable) {
    const auto r = homeostasis_metrics(series({{0, 10}, {1, 10}, {2, 0}, {3, 0}, {4, 0}}), 0.5, 10.0);
    EXPECT_FALSE(r.stable);
    ASSERT_EQ(r.extinct.size(), 1u);
    EXPECT_EQ(r.extinct[0], CellType::Stem);
}

TEST(Homeostasis, AlternatingSeriesHasCvOneHalf) {
    // a, 3a alternating: mean 2a, population standard deviation a.
    const auto r = homeostasis_metrics(series({{0, 4}, {1, 12}, {2, 4}, {3, 12}}), 1.0, 0.25);
    EXPECT_DOUBLE_EQ(r.stats[index_of(CellType::Stem)].mean, 8.0);
    EXPECT_DOUBLE_EQ(*r.stats[index_of(CellType::Stem)].cv, 0.5);
    EXPECT_FALSE(r.stable);
}

TEST(Homeostasis, WindowTooSmall) {
    EXPECT_THROW(homeostasis_metrics(series({{0, 1}}), 0.5, 0.25), WindowTooSmall);
    EXPECT_THROW(homeostasis_metrics(series({{0, 1}, {1, 1}, {10, 1}}), 0.1, 0.25), WindowTooSmall);
}

TEST(Sweep, ZeroDuplicationNeverDuplicates) {
    const auto p = small_params();
    const auto table =
        perturbation_sweep(p, preset_occupancy(p.geometry, "seeded"), "stem_duplication", {0.0}, 3);
    ASSERT_EQ(table.rows.size(), 1u);
    EXPECT_EQ(table.rows[0].event_counts[static_cast<std::size_t>(EventKind::Duplication)], 0);
    EXPECT_GT(table.rows[0].event_counts[static_cast<std::size_t>(EventKind::Differentiation)], 0);
}

TEST(Sweep, SourceRateFromEmptyStart) {
    const auto p = small_params();
    const auto table = perturbation_sweep(p, preset_occupancy(p.geometry, "empty"), "source_rate", {0.0, 1.0}, 3);
    ASSERT_EQ(table.rows.size(), 2u);
    EXPECT_EQ(table.rows[0].dead_fraction, 1.0);
    EXPECT_EQ(table.rows[0].stable_fraction, 0.0);
    EXPECT_GT(table.rows[1].mean[index_of(CellType::Stem)], 0.0);
    EXPECT_EQ(table.rows[1].dead_fraction, 0.0);
}

TEST(Sweep, DeterministicAndValidatesAxis) {
    const auto p = small_params();
    const auto init = preset_occupancy(p.geometry, "seeded");
    std::ostringstream a, b;
    write_sweep_csv(a, perturbation_sweep(p, init, "deg_goblet", {0.5, 2.0}, 3));
    write_sweep_csv(b, perturbation_sweep(p, init, "deg_goblet", {0.5, 2.0}, 3, {.max_threads = 1}));
    EXPECT_EQ(a.str(), b.str());
    EXPECT_THROW(perturbation_sweep(p, init, "wnt_level", {1.0}, 1), UnknownParameter);
    EXPECT_THROW(perturbation_sweep(p, init, "deg_goblet", {1.0}, 0), InvalidParams);
}

TEST(Sweep, InitScaleReplacesInitialCondition) {
    const auto p = small_params();
    const auto table = perturbation_sweep(p, preset_occupancy(p.geometry, "empty"), "init_scale", {0.0, 2.0}, 1);
    EXPECT_EQ(table.rows.size(), 2u);
    EXPECT_EQ(stem_fill_occupancy(p.geometry, 24).size(), 120u);
}

TEST(TrajectoryCsv, HeaderAndRowSums) {
    auto p = small_params();
    const auto r = run(p, "seeded");
    std::ostringstream os;
    write_trajectory_csv(os, r.trajectory);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "time,stem,paneth,ta1,ta2a,ta2b,goblet,enteroendocrine,enterocyte,empty");
    int rows = 0;
    while (std::getline(in, line)) {
        std::istringstream cells(line);
        std::string cell;
        std::getline(cells, cell, ',');
        long sum = 0;
        while (std::getline(cells, cell, ',')) sum += std::stol(cell);
        EXPECT_EQ(sum, 120);
        ++rows;
    }
    EXPECT_EQ(rows, 21);
}
