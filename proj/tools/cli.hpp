#pragma once

// Command-line front end. Exit codes: 0 success, 1 validation failure,
// 2 I/O or parse error. Errors go to stderr as
//   error<TAB><code><TAB><message>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cryptsim/cryptsim.hpp"

namespace cryptsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitIo = 2;

inline void error_line(std::ostream& err, const std::string& code, const std::string& message) {
    std::string flat = message;
    for (auto& ch : flat)
        if (ch == '\n' || ch == '\t') ch = ' ';
    while (!flat.empty() && flat.back() == ' ') flat.pop_back();
    err << "error\t" << code << '\t' << flat << '\n';
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw IoError("cannot write '" + path.string() + "'");
}

inline std::vector<double> parse_values(const std::string& list) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto v = parse_number(item);
        if (!v) throw Error("invalid_argument", "not a number in --values: '" + item + "'");
        out.push_back(*v);
    }
    if (out.empty()) throw Error("invalid_argument", "--values is empty");
    return out;
}

inline nlohmann::ordered_json report_to_json(const HomeostasisReport& r, double window_fraction, double cv_threshold) {
    nlohmann::ordered_json j;
    j["window"] = {r.t_start, r.t_end};
    j["window_fraction"] = window_fraction;
    j["cv_threshold"] = cv_threshold;
    j["stable"] = r.stable;
    auto& species = j["species"];
    for (CellType t : kAllCellTypes) {
        const auto& s = r.stats[index_of(t)];
        nlohmann::ordered_json e;
        e["mean"] = s.mean;
        e["variance"] = s.variance;
        e["cv"] = s.cv ? nlohmann::ordered_json(*s.cv) : nlohmann::ordered_json(nullptr);
        species[std::string(to_id(t))] = e;
    }
    j["extinct"] = nlohmann::ordered_json::array();
    for (CellType t : r.extinct) j["extinct"].push_back(std::string(to_id(t)));
    return j;
}

struct SimFlags {
    std::optional<std::uint64_t> seed;
    double t_max = 100;
    double record_dt = 1;
    double source_rate = 1;
    bool no_displacement = false;
    bool debug_checks = false;
};

inline void add_sim_flags(CLI::App* cmd, SimFlags& f) {
    cmd->add_option("--seed", f.seed, "RNG seed (falls back to $CRYPT_SEED, then 0)");
    cmd->add_option("--t-max", f.t_max, "simulated time horizon")->check(CLI::PositiveNumber);
    cmd->add_option("--record-dt", f.record_dt, "sampling interval of the trajectory")->check(CLI::PositiveNumber);
    cmd->add_option("--source-rate", f.source_rate, "stem spawn rate per empty source-layer site")
        ->check(CLI::NonNegativeNumber);
    cmd->add_flag("--no-displacement", f.no_displacement, "differentiated cells stay in place");
    cmd->add_flag("--debug-checks", f.debug_checks, "check lattice invariants after every event");
}

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("CRYPT_SEED")) {
        auto v = parse_integer(env);
        if (!v || *v < 0) throw Error("invalid_argument", std::string("CRYPT_SEED is not a seed: ") + env);
        return static_cast<std::uint64_t>(*v);
    }
    return 0;
}

inline SimParams make_params(const sbml::CryptModel& model, const SimFlags& f) {
    SimParams p;
    p.network = model.network;
    p.geometry = model.geometry;
    p.source_rate = f.source_rate;
    p.seed = resolve_seed(f.seed);
    p.t_max = f.t_max;
    p.record_interval = f.record_dt;
    p.displacement_enabled = !f.no_displacement;
    p.debug_checks = f.debug_checks;
    return p;
}

inline sbml::CryptModel load_model(const std::string& path) {
    return sbml::document_to_model(sbml::parse_document(read_file(path)));
}

inline int cmd_validate(const std::string& path, std::ostream& out) {
    auto doc = sbml::parse_document(read_file(path), {.check_references = false});
    ValidationReport report = sbml::validate_document(doc);
    if (report.ok()) {
        try {
            sbml::document_to_model(doc);
        } catch (const ReportError& e) {
            for (const auto& v : e.report().violations()) report.add(v.code, v.message);
        } catch (const Error& e) {
            report.add(e.code(), e.what());
        }
    }
    out << report.to_string();
    return report.ok() ? kExitOk : kExitInvalid;
}

inline int cmd_roundtrip(const std::string& path, std::ostream& out) {
    const auto first = sbml::parse_document(read_file(path));
    const auto text = sbml::emit_document(first);
    const auto second = sbml::parse_document(text);
    const bool same = first == second && sbml::emit_document(second) == text;
    out << (same ? "roundtrip: equal\n" : "roundtrip: documents differ\n");
    return same ? kExitOk : kExitInvalid;
}

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Colonic crypt lattice simulator and SBML Spatial tool"};
    app.require_subcommand(1);
    std::string spatial_ns(sbml::kDefaultSpatialNamespace);
    app.add_option("--spatial-ns", spatial_ns, "namespace URI of the spatial package for emitted documents");

    std::string file;
    std::string out_dir = "crypt_run";
    double window_fraction = kDefaultWindowFraction;
    double cv_threshold = kDefaultCvThreshold;
    std::optional<int> slice_y;
    SimFlags run_flags;

    auto* validate = app.add_subcommand("validate", "print the violation report of a document");
    validate->add_option("file", file, "SBML document")->required();

    auto* run_cmd = app.add_subcommand("run", "simulate a document and write trajectory, events, snapshot, report");
    run_cmd->add_option("file", file, "SBML document")->required();
    add_sim_flags(run_cmd, run_flags);
    run_cmd->add_option("--out", out_dir, "output directory");
    run_cmd->add_option("--window-fraction", window_fraction, "trailing fraction used for homeostasis metrics");
    run_cmd->add_option("--cv-threshold", cv_threshold, "largest coefficient of variation counted as stable");
    run_cmd->add_option("--slice", slice_y, "also write a top-down text view of this layer");

    SimFlags sweep_flags;
    std::string param;
    std::string values;
    int replicates = 1;
    std::string sweep_out = "sweep.csv";
    std::string sweep_init = "document";
    auto* sweep = app.add_subcommand("sweep", "vary one parameter over replicated runs");
    sweep->add_option("file", file, "SBML document")->required();
    sweep->add_option("--param", param, "reaction name, source_rate, or init_scale")->required();
    sweep->add_option("--values", values, "comma-separated values")->required();
    sweep->add_option("--replicates", replicates, "runs per value")->check(CLI::PositiveNumber);
    sweep->add_option("--init", sweep_init, "initial condition: document, empty, or seeded");
    sweep->add_option("--out", sweep_out, "sweep table CSV");
    sweep->add_option("--window-fraction", window_fraction);
    sweep->add_option("--cv-threshold", cv_threshold);
    add_sim_flags(sweep, sweep_flags);

    std::string preset = "seeded";
    int width = 4, height = 10, depth = 4;
    std::optional<int> source_layer;
    std::vector<std::string> rate_args;
    std::string export_out = "model.xml";
    auto* export_cmd = app.add_subcommand("export", "emit the canonical model as SBML");
    export_cmd->add_option("--preset", preset, "initial occupancy: seeded or empty");
    export_cmd->add_option("--width", width);
    export_cmd->add_option("--height", height);
    export_cmd->add_option("--depth", depth);
    export_cmd->add_option("--source-layer", source_layer, "source layer index (default height/3)");
    export_cmd->add_option("--rate", rate_args, "reaction rate as name=value (repeatable)");
    export_cmd->add_option("--out", export_out, "output file");

    auto* roundtrip = app.add_subcommand("roundtrip", "parse, emit and re-parse a document; exit 0 iff equal");
    roundtrip->add_option("file", file, "SBML document")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        error_line(err, "usage", e.what());
        return kExitIo;
    }

    try {
        if (*validate) return cmd_validate(file, out);
        if (*roundtrip) return cmd_roundtrip(file, out);

        if (*export_cmd) {
            std::map<std::string, double> rates;
            for (const auto& arg : rate_args) {
                auto eq = arg.find('=');
                auto v = eq == std::string::npos ? std::nullopt : parse_number(arg.substr(eq + 1));
                if (!v) throw Error("invalid_argument", "--rate expects name=value, got '" + arg + "'");
                rates[arg.substr(0, eq)] = *v;
            }
            const auto g = make_geometry(width, height, depth, source_layer);
            auto doc = sbml::model_to_document(build_default_network(rates), g, preset_occupancy(g, preset));
            doc.spatial_namespace = spatial_ns;
            write_file(export_out, sbml::emit_document(doc));
            out << "wrote " << export_out << '\n';
            return kExitOk;
        }

        if (*run_cmd) {
            const auto model = load_model(file);
            const auto params = make_params(model, run_flags);
            auto result = cryptsim::run(params, model.occupancy);
            std::filesystem::create_directories(out_dir);
            const std::filesystem::path dir(out_dir);

            std::ostringstream traj, events;
            write_trajectory_csv(traj, result.trajectory);
            write_events_csv(events, result.final_state.event_log, params.network);
            write_file(dir / "trajectory.csv", traj.str());
            write_file(dir / "events.csv", events.str());
            write_snapshot(result.final_state, (dir / "final.vtk").string());
            if (slice_y) write_file(dir / ("slice_y" + std::to_string(*slice_y) + ".txt"), format_slice(result.final_state, *slice_y));

            nlohmann::ordered_json summary;
            summary["seed"] = params.seed;
            summary["params_digest"] = result.trajectory.params_digest;
            summary["steps"] = result.steps;
            summary["dead_state"] = result.dead_state;
            if (result.dead_state) summary["dead_time"] = result.dead_time;
            if (params.debug_checks) summary["invariant_violations"] = result.invariant_violations;
            try {
                summary["homeostasis"] =
                    report_to_json(homeostasis_metrics(result.trajectory, window_fraction, cv_threshold), window_fraction,
                                   cv_threshold);
            } catch (const WindowTooSmall& e) {
                summary["homeostasis"] = nullptr;
                summary["homeostasis_error"] = e.what();
            }
            write_file(dir / "homeostasis.json", summary.dump(2) + "\n");
            out << "wrote " << out_dir << " (" << result.steps << " steps"
                << (result.dead_state ? ", dead state" : "") << ")\n";
            return kExitOk;
        }

        if (*sweep) {
            const auto model = load_model(file);
            const auto params = make_params(model, sweep_flags);
            const Occupancy init = sweep_init == "document" ? model.occupancy : preset_occupancy(model.geometry, sweep_init);
            SweepOptions opt;
            opt.window_fraction = window_fraction;
            opt.cv_threshold = cv_threshold;
            const auto table = perturbation_sweep(params, init, param, parse_values(values), replicates, opt);
            std::ostringstream csv;
            write_sweep_csv(csv, table);
            write_file(sweep_out, csv.str());
            out << "wrote " << sweep_out << '\n';
            return kExitOk;
        }
    } catch (const xml::XmlSyntaxError& e) {
        error_line(err, e.code(), e.what());
        return kExitIo;
    } catch (const IoError& e) {
        error_line(err, e.code(), e.what());
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        error_line(err, "io", e.what());
        return kExitIo;
    } catch (const sbml::SchemaError& e) {
        error_line(err, e.code(), e.what());
        return kExitIo;
    } catch (const Error& e) {
        error_line(err, e.code(), e.what());
        return kExitInvalid;
    }
    return kExitOk;
}

} // namespace cryptsim::cli
