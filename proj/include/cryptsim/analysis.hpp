#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "cell_type.hpp"
#include "error.hpp"
#include "network.hpp"
#include "number_format.hpp"
#include "occupancy.hpp"
#include "sim.hpp"
#include "trajectory.hpp"

namespace cryptsim {

class WindowTooSmall : public Error {
public:
    explicit WindowTooSmall(const std::string& what) : Error("window_too_small", what) {}
};

class UnknownParameter : public Error {
public:
    explicit UnknownParameter(const std::string& name)
        : Error("unknown_parameter", "unknown sweep parameter '" + name + "'") {}
};

struct SpeciesStats {
    double mean = 0;
    double variance = 0;        // population variance over the window
    std::optional<double> cv;   // absent when mean == 0
};

struct HomeostasisReport {
    double t_start = 0;
    double t_end = 0;
    std::array<SpeciesStats, kCellTypeCount> stats{}; // indexed by CellType, Empty included
    std::vector<CellType> extinct;
    bool stable = false;
};

inline constexpr double kDefaultWindowFraction = 0.5;
inline constexpr double kDefaultCvThreshold = 0.25;

/// Statistics over the trailing `window_fraction` of the time span. Stable
/// iff every species with nonzero mean has CV <= cv_threshold and no species
/// with nonzero first-half mean is identically zero over the window. Empty is
/// reported but never judged.
inline HomeostasisReport homeostasis_metrics(const Trajectory& traj, double window_fraction = kDefaultWindowFraction,
                                             double cv_threshold = kDefaultCvThreshold) {
    if (!(window_fraction > 0 && window_fraction <= 1)) throw Error("invalid_argument", "window_fraction must be in (0, 1]");
    if (traj.size() < 2) throw WindowTooSmall("trajectory has fewer than 2 samples");

    const double first = traj.times.front();
    const double last = traj.times.back();
    const double span = last - first;
    const double eps = span * 1e-12;
    const double window_start = last - window_fraction * span;
    const double midpoint = first + span / 2;

    std::size_t begin = 0;
    while (begin < traj.size() && traj.times[begin] < window_start - eps) ++begin;
    const std::size_t n = traj.size() - begin;
    if (n < 2) throw WindowTooSmall("window holds " + std::to_string(n) + " sample(s), need 2");

    HomeostasisReport report;
    report.t_start = traj.times[begin];
    report.t_end = last;
    report.stable = true;

    for (CellType t : kAllCellTypes) {
        const auto col = index_of(t);
        double sum = 0;
        for (std::size_t i = begin; i < traj.size(); ++i) sum += static_cast<double>(traj.populations[i][col]);
        const double mean = sum / static_cast<double>(n);
        double ss = 0;
        bool all_zero = true;
        for (std::size_t i = begin; i < traj.size(); ++i) {
            const double d = static_cast<double>(traj.populations[i][col]) - mean;
            ss += d * d;
            all_zero = all_zero && traj.populations[i][col] == 0;
        }
        auto& s = report.stats[col];
        s.mean = mean;
        s.variance = ss / static_cast<double>(n);
        if (mean != 0) s.cv = std::sqrt(s.variance) / mean;

        if (t == CellType::Empty) continue;
        if (s.cv && *s.cv > cv_threshold) report.stable = false;

        double early_sum = 0;
        std::size_t early_n = 0;
        for (std::size_t i = 0; i < traj.size() && traj.times[i] <= midpoint + eps; ++i, ++early_n)
            early_sum += static_cast<double>(traj.populations[i][col]);
        if (early_n > 0 && early_sum > 0 && all_zero) {
            report.extinct.push_back(t);
            report.stable = false;
        }
    }
    return report;
}

inline constexpr std::string_view kSourceRateAxis = "source_rate";
inline constexpr std::string_view kInitScaleAxis = "init_scale";

struct SweepOptions {
    double window_fraction = kDefaultWindowFraction;
    double cv_threshold = kDefaultCvThreshold;
    unsigned max_threads = 0; // 0: hardware concurrency
};

inline constexpr std::size_t kEventKindCount = 6;

struct SweepRow {
    double value = 0;
    std::array<double, kSpeciesCount> mean{};                // replicate average of window means
    std::array<std::optional<double>, kSpeciesCount> cv{};   // replicate average where defined
    double stable_fraction = 0;
    double dead_fraction = 0;
    std::array<long, kEventKindCount> event_counts{};        // summed over replicates, by EventKind
};

struct SweepTable {
    std::string axis;
    int replicates = 0;
    std::vector<SweepRow> rows;
};

namespace detail {

struct ReplicateOutcome {
    std::optional<HomeostasisReport> report;
    bool dead = false;
    std::array<long, kEventKindCount> event_counts{};
};

inline ReplicateOutcome run_replicate(const SimParams& params, const Occupancy& init, const SweepOptions& opt) {
    ReplicateOutcome out;
    auto result = run(params, init);
    out.dead = result.dead_state;
    for (const auto& e : result.final_state.event_log) ++out.event_counts[static_cast<std::size_t>(e.kind)];
    try {
        out.report = homeostasis_metrics(result.trajectory, opt.window_fraction, opt.cv_threshold);
    } catch (const WindowTooSmall&) {
    }
    return out;
}

} // namespace detail

/// Axis names: any reaction name of the network, "source_rate", or
/// "init_scale" (replaces `init` with round(value * perimeter) stem cells
/// filled upward from the source layer). Replicate r of every value uses
/// seed base.seed + r.
inline SweepTable perturbation_sweep(const SimParams& base, const Occupancy& base_init, const std::string& axis,
                                     const std::vector<double>& values, int replicates, const SweepOptions& opt = {}) {
    const bool is_reaction = base.network.find(axis).has_value();
    if (!is_reaction && axis != kSourceRateAxis && axis != kInitScaleAxis) throw UnknownParameter(axis);
    if (replicates < 1) throw InvalidParams("replicates must be >= 1");

    SweepTable table{axis, replicates, {}};
    const unsigned threads = opt.max_threads ? opt.max_threads : std::max(1u, std::thread::hardware_concurrency());

    for (double value : values) {
        SimParams params = base;
        Occupancy init;
        if (is_reaction) {
            params.network = base.network.with_rate(axis, value);
        } else if (axis == kSourceRateAxis) {
            if (value < 0) throw InvalidParams("source_rate must be >= 0");
            params.source_rate = value;
        }
        if (axis == kInitScaleAxis) {
            if (value < 0) throw InvalidParams("init_scale must be >= 0");
            init = stem_fill_occupancy(base.geometry, std::lround(value * base.geometry.perimeter()));
        } else {
            init = base_init;
        }
        validate_params(params);

        std::vector<detail::ReplicateOutcome> outcomes(static_cast<std::size_t>(replicates));
        for (int first = 0; first < replicates; first += static_cast<int>(threads)) {
            const int last = std::min(replicates, first + static_cast<int>(threads));
            std::vector<std::future<detail::ReplicateOutcome>> jobs;
            for (int r = first; r < last; ++r) {
                SimParams p = params;
                p.seed = base.seed + static_cast<std::uint64_t>(r);
                jobs.push_back(std::async(std::launch::async, [p, &init, &opt] { return detail::run_replicate(p, init, opt); }));
            }
            for (int r = first; r < last; ++r) outcomes[static_cast<std::size_t>(r)] = jobs[static_cast<std::size_t>(r - first)].get();
        }

        SweepRow row;
        row.value = value;
        std::array<int, kSpeciesCount> cv_n{};
        std::array<double, kSpeciesCount> cv_sum{};
        int stable = 0, dead = 0;
        for (const auto& o : outcomes) {
            for (std::size_t k = 0; k < kEventKindCount; ++k) row.event_counts[k] += o.event_counts[k];
            if (o.dead) ++dead;
            if (o.report && o.report->stable && !o.dead) ++stable;
            if (!o.report) continue;
            for (std::size_t s = 0; s < kSpeciesCount; ++s) {
                const auto& st = o.report->stats[s];
                row.mean[s] += st.mean / replicates;
                if (st.cv) {
                    cv_sum[s] += *st.cv;
                    ++cv_n[s];
                }
            }
        }
        for (std::size_t s = 0; s < kSpeciesCount; ++s)
            if (cv_n[s] > 0) row.cv[s] = cv_sum[s] / cv_n[s];
        row.stable_fraction = static_cast<double>(stable) / replicates;
        row.dead_fraction = static_cast<double>(dead) / replicates;
        table.rows.push_back(row);
    }
    return table;
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "time";
    for (CellType t : kAllCellTypes) os << ',' << to_id(t);
    os << '\n';
    for (std::size_t i = 0; i < traj.size(); ++i) {
        os << format_number(traj.times[i]);
        for (long n : traj.populations[i]) os << ',' << n;
        os << '\n';
    }
}

inline void write_events_csv(std::ostream& os, const std::vector<Event>& log, const ReactionNetwork& net) {
    os << "time,kind,x,y,z,cell,reaction,direction,target_x,target_y,target_z\n";
    for (const auto& e : log) {
        os << format_number(e.time) << ',' << to_string(e.kind) << ',' << e.site.x << ',' << e.site.y << ','
           << e.site.z << ',' << to_id(e.cell) << ','
           << (e.reaction >= 0 ? net[static_cast<std::size_t>(e.reaction)].name : std::string{}) << ','
           << to_string(e.direction) << ',';
        if (e.kind == EventKind::Duplication || e.kind == EventKind::Displacement)
            os << e.target.x << ',' << e.target.y << ',' << e.target.z;
        else
            os << ",,";
        os << '\n';
    }
}

inline void write_sweep_csv(std::ostream& os, const SweepTable& table) {
    os << "value";
    for (CellType t : kSpecies) os << ",mean_" << to_id(t);
    for (CellType t : kSpecies) os << ",cv_" << to_id(t);
    os << ",stable_fraction,dead_fraction";
    for (std::size_t k = 0; k < kEventKindCount; ++k) os << ",events_" << to_string(static_cast<EventKind>(k));
    os << '\n';
    for (const auto& row : table.rows) {
        os << format_number(row.value);
        for (double m : row.mean) os << ',' << format_number(m);
        for (const auto& cv : row.cv) os << ',' << (cv ? format_number(*cv) : std::string{});
        os << ',' << format_number(row.stable_fraction) << ',' << format_number(row.dead_fraction);
        for (long n : row.event_counts) os << ',' << n;
        os << '\n';
    }
}

} // namespace cryptsim
