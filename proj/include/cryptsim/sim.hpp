#pragma once

// Gillespie direct-method simulation of the crypt lattice.
//
// Every occupied site contributes one event per applicable reaction, and
// every Empty source-layer site a spawn event. Differentiation moves the
// new cell one layer (Paneth down, the other non-stem types up), shoving
// the column ahead of it; cells entering a sink layer are absorbed.

#include <cstdint>
#include <cstdio>
#include <string>
#include <variant>
#include <vector>

#include "cell_type.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "lattice.hpp"
#include "network.hpp"
#include "number_format.hpp"
#include "occupancy.hpp"
#include "rng.hpp"
#include "trajectory.hpp"

namespace cryptsim {

class DeadState : public Error {
public:
    explicit DeadState(double time)
        : Error("dead_state", "total propensity is zero at t=" + format_number(time)), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class InvalidParams : public Error {
public:
    explicit InvalidParams(const std::string& what) : Error("invalid_params", what) {}
};

struct SimParams {
    ReactionNetwork network = build_default_network();
    CryptGeometry geometry{};
    double source_rate = 1.0; // per Empty source-layer site, 1/time
    std::uint64_t seed = 0;
    double t_max = 100.0;
    double record_interval = 1.0;

    /// Test hook: when false, differentiated cells stay where they are.
    bool displacement_enabled = true;
    /// When true, run() checks state invariants after every step.
    bool debug_checks = false;
};

inline void validate_params(const SimParams& p) {
    if (!(p.t_max > 0)) throw InvalidParams("t_max must be > 0");
    if (!(p.record_interval > 0)) throw InvalidParams("record_interval must be > 0");
    if (!(p.source_rate >= 0)) throw InvalidParams("source_rate must be >= 0");
    if (auto problem = geometry_problem(p.geometry); !problem.empty()) throw InvalidGeometry(problem);
    if (auto report = validate_network(p.network); !report.ok())
        throw InvalidParams("network failed validation:\n" + report.to_string());
}

enum class EventKind { Differentiation, Duplication, Degradation, SourceSpawn, Displacement, Absorption };

inline const char* to_string(EventKind k) noexcept {
    switch (k) {
    case EventKind::Differentiation: return "differentiation";
    case EventKind::Duplication: return "duplication";
    case EventKind::Degradation: return "degradation";
    case EventKind::SourceSpawn: return "source_spawn";
    case EventKind::Displacement: return "displacement";
    case EventKind::Absorption: return "absorption";
    }
    return "?";
}

enum class Direction { None, Up, Down };

inline const char* to_string(Direction d) noexcept {
    switch (d) {
    case Direction::None: return "none";
    case Direction::Up: return "up";
    case Direction::Down: return "down";
    }
    return "?";
}

/// Displacement direction for a freshly differentiated cell.
constexpr Direction displacement_direction(CellType t) noexcept {
    if (t == CellType::Paneth) return Direction::Down;
    if (t == CellType::Stem || t == CellType::Empty) return Direction::None;
    return Direction::Up;
}

/// Log entry. `site` is where the event happened; `target` is the daughter
/// site of a duplication or the destination of a displacement. `cell` is the
/// type produced, moved, or absorbed (for degradation, the type removed).
struct Event {
    double time = 0;
    EventKind kind = EventKind::Differentiation;
    SiteCoord site{};
    CellType cell = CellType::Empty;
    int reaction = -1;
    Direction direction = Direction::None;
    SiteCoord target{};

    friend bool operator==(const Event&, const Event&) = default;
};

struct Candidate {
    EventKind kind = EventKind::SourceSpawn;
    int site = 0; // box index
    int reaction = -1;
    double propensity = 0;

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct PropensityTable {
    std::vector<Candidate> events;
    double total = 0;
};

class SimState {
public:
    explicit SimState(const CryptGeometry& g, std::uint64_t seed = 0) : grid(g), rng(seed) {}

    double time = 0;
    Lattice grid;
    Rng rng;
    std::vector<Event> event_log;

    const CryptGeometry& geometry() const noexcept { return grid.geometry(); }

    friend bool operator==(const SimState& a, const SimState& b) {
        return a.time == b.time && a.grid == b.grid && a.rng == b.rng && a.event_log == b.event_log;
    }

    PropensityTable scratch; // reused by step(); not part of the state
};

namespace detail {

inline int empty_neighbor_count(const Lattice& grid, int site) {
    int n = 0;
    for (int nb : grid.topology().neighbors(site))
        if (grid[nb] == CellType::Empty) ++n;
    return n;
}

inline void absorb_sinks(SimState& state) {
    const auto& topo = state.grid.topology();
    for (int i : topo.shell()) {
        if (!is_sink_layer(topo.geometry(), topo.y_of(i)) || state.grid[i] == CellType::Empty) continue;
        state.event_log.push_back({state.time, EventKind::Absorption, topo.coord(i), state.grid[i]});
        state.grid.set(i, CellType::Empty);
    }
}

} // namespace detail

/// State at time 0 holding `init`. Cells placed in a sink layer are absorbed
/// immediately and logged.
inline SimState init_state(const SimParams& params, const Occupancy& init) {
    SimState state(params.geometry, params.seed);
    state.grid = Lattice(params.geometry, init);
    detail::absorb_sinks(state);
    return state;
}

inline SimState init_state(const SimParams& params, const std::string& preset) {
    return init_state(params, preset_occupancy(params.geometry, preset));
}

/// Fills `out` with every candidate event in shell enumeration order.
inline void compute_propensities(const SimState& state, const SimParams& params, PropensityTable& out) {
    out.events.clear();
    out.total = 0;
    const auto& grid = state.grid;
    const auto& topo = grid.topology();
    const auto& net = params.network;

    for (int site : topo.shell()) {
        const CellType cell = grid[site];
        if (cell == CellType::Empty) {
            if (topo.y_of(site) == topo.geometry().source_layer_y)
                out.events.push_back({EventKind::SourceSpawn, site, -1, params.source_rate});
            continue;
        }
        for (std::size_t r = 0; r < net.size(); ++r) {
            const auto& reaction = net[r];
            if (reaction.reactant != cell) continue;
            Candidate c{EventKind::Differentiation, site, static_cast<int>(r), reaction.rate};
            switch (reaction.kind) {
            case ReactionKind::Differentiation: break;
            case ReactionKind::Duplication:
                c.kind = EventKind::Duplication;
                c.propensity = reaction.rate * detail::empty_neighbor_count(grid, site);
                break;
            case ReactionKind::Degradation: c.kind = EventKind::Degradation; break;
            }
            out.events.push_back(c);
        }
    }
    for (const auto& c : out.events) out.total += c.propensity;
}

inline PropensityTable compute_propensities(const SimState& state, const SimParams& params) {
    PropensityTable table;
    compute_propensities(state, params, table);
    return table;
}

/// Moves the cell at `p` one layer in `dir`, shoving the occupied run of
/// cells ahead of it. The cell that reaches a sink layer is absorbed.
inline void apply_displacement(SimState& state, const SiteCoord& p, Direction dir) {
    if (dir == Direction::None) return;
    auto& grid = state.grid;
    const auto& topo = grid.topology();
    const auto& g = topo.geometry();
    const int dy = dir == Direction::Up ? 1 : -1;
    const int sink_y = dir == Direction::Up ? g.sink_top_y() : g.sink_bottom_y();
    const int origin = topo.index(p);
    const CellType moving = grid[origin];

    if (p.y == sink_y) {
        state.event_log.push_back({state.time, EventKind::Absorption, p, moving});
        grid.set(origin, CellType::Empty);
        return;
    }

    state.event_log.push_back(
        {state.time, EventKind::Displacement, p, moving, -1, dir, SiteCoord{p.x, p.y + dy, p.z}});

    // First free slot ahead: an Empty site, or the sink layer.
    int y = p.y + dy;
    while (y != sink_y && grid.at({p.x, y, p.z}) != CellType::Empty) y += dy;
    for (int k = y; k != p.y; k -= dy) grid.set(topo.index({p.x, k, p.z}), grid.at({p.x, k - dy, p.z}));
    grid.set(origin, CellType::Empty);

    if (y == sink_y) {
        const int at_sink = topo.index({p.x, y, p.z});
        state.event_log.push_back({state.time, EventKind::Absorption, SiteCoord{p.x, y, p.z}, grid[at_sink]});
        grid.set(at_sink, CellType::Empty);
    }
}

/// One direct-method step. Throws DeadState when nothing can happen.
inline Event step(SimState& state, const SimParams& params) {
    auto& table = state.scratch;
    compute_propensities(state, params, table);
    if (!(table.total > 0)) throw DeadState(state.time);

    state.time += state.rng.exponential(table.total);

    const double target = state.rng.uniform() * table.total;
    const Candidate* chosen = nullptr;
    double acc = 0;
    for (const auto& c : table.events) {
        if (c.propensity <= 0) continue;
        chosen = &c;
        acc += c.propensity;
        if (target < acc) break;
    }
    const Candidate c = *chosen;

    auto& grid = state.grid;
    const auto& topo = grid.topology();
    const SiteCoord site = topo.coord(c.site);
    Event fired{state.time, c.kind, site, CellType::Empty, c.reaction};

    switch (c.kind) {
    case EventKind::Differentiation: {
        const CellType product = *params.network[static_cast<std::size_t>(c.reaction)].product;
        grid.set(c.site, product);
        fired.cell = product;
        state.event_log.push_back(fired);
        if (params.displacement_enabled) apply_displacement(state, site, displacement_direction(product));
        break;
    }
    case EventKind::Duplication: {
        std::vector<int> empty;
        for (int nb : topo.neighbors(c.site))
            if (grid[nb] == CellType::Empty) empty.push_back(nb);
        const int daughter = empty[state.rng.below(empty.size())];
        grid.set(daughter, CellType::Stem);
        fired.cell = CellType::Stem;
        fired.target = topo.coord(daughter);
        state.event_log.push_back(fired);
        if (is_sink_layer(topo.geometry(), fired.target.y)) {
            state.event_log.push_back({state.time, EventKind::Absorption, fired.target, CellType::Stem});
            grid.set(daughter, CellType::Empty);
        }
        break;
    }
    case EventKind::Degradation:
        fired.cell = grid[c.site];
        grid.set(c.site, CellType::Empty);
        state.event_log.push_back(fired);
        break;
    case EventKind::SourceSpawn:
        grid.set(c.site, CellType::Stem);
        fired.cell = CellType::Stem;
        state.event_log.push_back(fired);
        break;
    default: break;
    }
    return fired;
}

/// Invariant violations of a state: occupied interior sites, occupied sink
/// sites, out-of-range cell values.
inline std::vector<std::string> check_invariants(const SimState& state) {
    std::vector<std::string> out;
    const auto& topo = state.grid.topology();
    const auto cells = state.grid.cells();
    for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
        const CellType t = cells[static_cast<std::size_t>(i)];
        if (index_of(t) >= kCellTypeCount) out.push_back("invalid cell value at " + to_string(topo.coord(i)));
        if (!topo.is_shell(i) && t != CellType::Empty)
            out.push_back("interior site occupied at " + to_string(topo.coord(i)));
        if (topo.is_shell(i) && is_sink_layer(topo.geometry(), topo.y_of(i)) && t != CellType::Empty)
            out.push_back("sink site occupied at " + to_string(topo.coord(i)));
    }
    long total = 0;
    for (long n : state.grid.populations()) total += n;
    if (total != topo.geometry().shell_site_count()) out.push_back("population total differs from shell size");
    return out;
}

/// Stable hex digest of the parameters that shape a trajectory.
inline std::string params_digest(const SimParams& p) {
    std::string text = std::to_string(p.geometry.width) + "," + std::to_string(p.geometry.height) + "," +
                       std::to_string(p.geometry.depth) + "," + std::to_string(p.geometry.source_layer_y) + ";" +
                       format_number(p.source_rate) + ";" + format_number(p.t_max) + ";" +
                       format_number(p.record_interval) + ";" + (p.displacement_enabled ? "d" : "n");
    for (const auto& r : p.network.reactions())
        text += ";" + r.name + ":" + std::string(to_id(r.reactant)) + ">" +
                (r.product ? std::string(to_id(*r.product)) : "") + "=" + format_number(r.rate);
    std::uint64_t h = 1469598103934665603ull; // FNV-1a
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct RunResult {
    Trajectory trajectory;
    SimState final_state;
    bool dead_state = false;
    double dead_time = 0;
    std::size_t steps = 0;
    std::size_t invariant_violations = 0;
};

/// Steps until time >= t_max or DeadState. Populations are sampled at
/// k * record_interval for every k with k * record_interval <= t_max; once
/// the state is dead the remaining samples repeat the frozen populations.
inline RunResult run(const SimParams& params, SimState state) {
    validate_params(params);
    RunResult result{{}, std::move(state)};
    auto& s = result.final_state;
    auto& traj = result.trajectory;
    traj.seed = params.seed;
    traj.params_digest = params_digest(params);

    const double eps = params.record_interval * 1e-9;
    long k = 0;
    auto next_sample = [&] { return static_cast<double>(k) * params.record_interval; };
    auto record_before = [&](double limit, const Populations& pops, bool inclusive) {
        while (next_sample() <= params.t_max + eps && (inclusive ? next_sample() <= limit : next_sample() < limit)) {
            traj.times.push_back(next_sample());
            traj.populations.push_back(pops);
            ++k;
        }
    };

    Populations pops = s.grid.populations();
    if (params.debug_checks) result.invariant_violations += check_invariants(s).size();
    while (s.time < params.t_max) {
        try {
            step(s, params);
        } catch (const DeadState& dead) {
            result.dead_state = true;
            result.dead_time = dead.time();
            break;
        }
        ++result.steps;
        record_before(s.time, pops, false);
        pops = s.grid.populations();
        if (params.debug_checks) result.invariant_violations += check_invariants(s).size();
    }
    record_before(params.t_max + eps, pops, true);
    return result;
}

inline RunResult run(const SimParams& params, const Occupancy& init) { return run(params, init_state(params, init)); }

inline RunResult run(const SimParams& params, const std::string& preset) {
    return run(params, init_state(params, preset));
}

} // namespace cryptsim
