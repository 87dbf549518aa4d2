#include "ftvr/metrics.hpp"
#include "ftvr/protocol.hpp"
#include "ftvr/report.hpp"
#include "ftvr/server.hpp"
#include "ftvr/simulation.hpp"
#include "ftvr/stats.hpp"
#include "ftvr/trace.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace ftvr;

namespace {

constexpr int exit_usage = 1;
constexpr int exit_data = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<TechniqueKind> parse_technique_list(const std::string& list) {
    std::vector<TechniqueKind> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(parse_technique(item));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    if (out.empty()) throw UsageError("no technique given");
    return out;
}

MappingModel mapping_option(const std::string& path) {
    return path.empty() ? default_mapping_model() : load_mapping(path);
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

int cmd_calibrate(const std::string& path) {
    const auto samples = load_calibration(path);
    const MappingModel model = fit_linear_map(samples);
    std::cout << to_json(model).dump(2) << '\n';
    return 0;
}

struct SimulateOptions {
    std::string task = "menu15";
    std::string techniques = "two-fingers";
    int participants = 1;
    std::uint64_t seed = 1;
    std::string out_dir;
    std::string mapping_mode;
    std::string mapping_path;
    bool noiseless = false;
};

int cmd_simulate(const SimulateOptions& o) {
    NoiseModel noise = o.noiseless ? NoiseModel::zero() : NoiseModel::from_mean_radial();
    if (o.participants < 1) throw UsageError("--participants must be at least 1");

    if (o.task == "calibration") {
        const MappingModel planted = o.mapping_path.empty() ? nominal_mapping_model() : load_mapping(o.mapping_path);
        std::vector<CalibrationSample> all;
        for (int p = 1; p <= o.participants; ++p) {
            const auto s = simulate_calibration(planted, noise, CalibrationGrid::standard(), p, o.seed);
            all.insert(all.end(), s.begin(), s.end());
        }
        std::ostringstream text;
        write_calibration(text, all);
        if (o.out_dir.empty()) {
            std::cout << text.str();
        } else {
            write_file(fs::path(o.out_dir) / "calibration.jsonl", text.str());
        }
        return 0;
    }

    StudyPlan plan;
    try {
        plan.task = parse_task(o.task);
        if (!o.mapping_mode.empty()) plan.base.mapping_mode = parse_mapping_mode(o.mapping_mode);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    plan.techniques = parse_technique_list(o.techniques);
    plan.participants = o.participants;
    plan.seed = o.seed;
    plan.noise = noise;
    plan.base.mapping = mapping_option(o.mapping_path);

    const auto runs = simulate_study(plan);
    std::vector<TrialRecord> records;
    int abandoned = 0;
    for (const auto& run : runs) {
        records.insert(records.end(), run.result.records.begin(), run.result.records.end());
        abandoned += run.result.abandoned ? 1 : 0;
        if (!o.out_dir.empty()) {
            write_file(fs::path(o.out_dir) / "traces" / (run.result.trace.header.session_id + ".jsonl"),
                       trace_to_string(run.result.trace));
        }
    }
    std::ostringstream csv;
    write_records_csv(csv, records);
    if (o.out_dir.empty()) {
        std::cout << csv.str();
    } else {
        write_file(fs::path(o.out_dir) / "records.csv", csv.str());
    }
    if (abandoned > 0) std::cerr << "warning: " << abandoned << " session(s) hit the attempt guard\n";
    return 0;
}

int cmd_replay(const std::string& path, const std::string& mapping_path, bool as_json) {
    const Trace trace = load_trace(path);
    const ReplayResult result = replay(trace, mapping_option(mapping_path));
    if (result.underflow) std::cerr << "warning: trace ended mid-trial; the open trial is marked abandoned\n";
    if (as_json) {
        json j = summary_message(result.records);
        j["offscreen_count"] = result.offscreen_count;
        j["underflow"] = result.underflow;
        std::vector<TrialRecord> done;
        for (const auto& r : result.records) {
            if (!r.abandoned) done.push_back(r);
        }
        if (!done.empty()) j["report"] = stats_report(done)["tasks"];
        std::cout << j.dump(2) << '\n';
    } else {
        write_records_csv(std::cout, result.records);
    }
    return 0;
}

int cmd_stats(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    const auto records = read_records_csv(in);
    std::cout << stats_report(records).dump(2) << '\n';
    return 0;
}

int cmd_latinsquare(int n) {
    if (n < 1) throw UsageError("--n must be at least 1");
    for (const auto& row : latin_square(n)) {
        for (std::size_t i = 0; i < row.size(); ++i) std::cout << (i ? " " : "") << row[i];
        std::cout << '\n';
    }
    return 0;
}

SessionServer* active_server = nullptr;

int cmd_serve(int port, const std::string& address, const std::string& log_dir, const std::string& mapping_path) {
    if (port < 0 || port > 65535) throw UsageError("--port out of range");
    SessionConfig base;
    base.mapping = mapping_option(mapping_path);
    SessionServer server(static_cast<std::uint16_t>(port), log_dir, base, address);
    active_server = &server;
    std::signal(SIGINT, [](int) {
        if (active_server) active_server->stop();
    });
    std::cerr << "listening on ws://" << address << ':' << server.port() << '\n';
    server.run();
    active_server = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Front-touch VR interaction engine and study harness"};
    app.require_subcommand(1);

    std::string calibrate_path;
    auto* calibrate = app.add_subcommand("calibrate", "Fit a mapping model to a calibration trace");
    calibrate->add_option("trace", calibrate_path, "Calibration JSONL")->required();

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Run synthetic participants");
    simulate->add_option("--task", sim.task, "binary, menu15, keyboard or calibration")->required();
    simulate->add_option("--technique", sim.techniques, "Technique, or a comma-separated list");
    simulate->add_option("--participants", sim.participants, "Number of participants");
    simulate->add_option("--seed", sim.seed, "Base seed");
    simulate->add_option("--out", sim.out_dir, "Output directory for traces and records.csv (default: CSV on stdout)");
    simulate->add_option("--mapping-mode", sim.mapping_mode, "absolute, relative or hybrid");
    simulate->add_option("--mapping", sim.mapping_path, "Mapping model JSON");
    simulate->add_flag("--noiseless", sim.noiseless, "Zero every noise source");

    std::string replay_path, replay_mapping;
    bool replay_json = false;
    auto* replay_cmd = app.add_subcommand("replay", "Replay an event trace");
    replay_cmd->add_option("trace", replay_path, "Trace JSONL")->required();
    replay_cmd->add_option("--mapping", replay_mapping, "Mapping model JSON");
    replay_cmd->add_flag("--json", replay_json, "Print records and metrics as JSON instead of CSV");

    std::string stats_path;
    auto* stats_cmd = app.add_subcommand("stats", "Analyse a records CSV");
    stats_cmd->add_option("csv", stats_path, "Records CSV")->required();

    int square_n = 0;
    auto* square = app.add_subcommand("latinsquare", "Print condition orders");
    square->add_option("--n", square_n, "Number of conditions")->required();

    int port = 8765;
    std::string address = "127.0.0.1", log_dir, serve_mapping;
    auto* serve = app.add_subcommand("serve", "Run the WebSocket session server");
    serve->add_option("--port", port, "TCP port (0 picks one)");
    serve->add_option("--address", address, "Bind address");
    serve->add_option("--log-dir", log_dir, "Write each live session as a trace");
    serve->add_option("--mapping", serve_mapping, "Mapping model JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*calibrate) return cmd_calibrate(calibrate_path);
        if (*simulate) return cmd_simulate(sim);
        if (*replay_cmd) return cmd_replay(replay_path, replay_mapping, replay_json);
        if (*stats_cmd) return cmd_stats(stats_path);
        if (*square) return cmd_latinsquare(square_n);
        if (*serve) return cmd_serve(port, address, log_dir, serve_mapping);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n' << app.help();
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    }
    return exit_usage;
}
