/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

// hrcsim: run, replay and score simulations, validate scenario files, serve the browser UI.
//
// Exit codes: 0 ok, 1 runtime error, 2 invalid input, 3 run timed out before completion,
// 4 replayed metrics differ from the stored ones.

#include "hrcsim/hrcsim.hpp"
#include "hrcsim/ui_server.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace hrcsim;

namespace {

enum Exit { kOk = 0, kRuntime = 1, kInvalid = 2, kTimeout = 3, kMismatch = 4 };

std::optional<std::uint64_t> env_seed() {
    if (const char* s = std::getenv("HRCSIM_SEED"); s && *s) {
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
            throw ValidationError("HRCSIM_SEED", std::string("not an unsigned integer: ") + s);
        }
    }
    return std::nullopt;
}

fs::path default_log_path(std::uint64_t seed) {
    fs::path dir = ".";
    if (const char* d = std::getenv("HRCSIM_LOG_DIR"); d && *d) dir = d;
    fs::create_directories(dir);
    return dir / ("run-" + std::to_string(seed) + ".jsonl");
}

Scenario scenario_or_default(const std::string& path) {
    return path.empty() ? nine_block_mirror() : load_scenario(path);
}

SimConfig config_or_default(const std::string& path) {
    return path.empty() ? SimConfig{} : load_config(path);
}

void print_world(const WorldState& w) {
    std::cout << "t=" << w.time << "  human " << w.human.effector.x << ' ' << w.human.effector.y << ' '
              << w.human.effector.z << "  robot " << w.robot.effector.x << ' ' << w.robot.effector.y << ' '
              << w.robot.effector.z << '\n';
    for (const Workpiece& p : w.workpieces) {
        std::cout << "  workpiece " << p.id << ": " << to_string(p.status);
        if (p.placed_slot) std::cout << " (slot " << *p.placed_slot << ")";
        std::cout << '\n';
    }
}

struct RunArgs {
    std::string scenario;
    std::string config;
    std::string human = "idle";
    std::string out;
    std::optional<std::uint64_t> seed;
};

int cmd_run(const RunArgs& a) {
    const Scenario scenario = scenario_or_default(a.scenario);
    SimConfig config = config_or_default(a.config);
    if (a.seed) config.seed = *a.seed;
    else if (auto s = env_seed()) config.seed = *s;
    const HumanModel human = load_human(a.human, config.dt);

    const EventLog log = run(scenario, config, human);
    const fs::path out = a.out.empty() ? default_log_path(config.seed) : fs::path(a.out);
    write_log(log, out);

    const RunSummary& s = *log.summary;
    std::cout << (s.complete ? "complete" : "timed out") << " after " << s.ticks << " ticks ("
              << s.metrics.completion_time << " s); log written to " << out.string() << "\n\n"
              << format_metrics_table(s.metrics);
    return s.complete ? kOk : kTimeout;
}

int cmd_replay(const std::string& path, const std::string& range) {
    const EventLog log = read_log(path);
    if (!range.empty()) {
        const auto colon = range.find(':');
        if (colon == std::string::npos) throw ValidationError("tick-range", "expected <from>:<to>");
        const double dt = log.header.config.dt;
        const double from = std::stod(range.substr(0, colon)) * dt;
        const double to = std::stod(range.substr(colon + 1)) * dt;
        for (const SimEvent& e : log.events) {
            if (e.time >= from - 1e-9 && e.time <= to + 1e-9) std::cout << json(e).dump() << '\n';
        }
        print_world(reconstruct_world(log, to + 1e-9));
        return kOk;
    }
    const ReplayResult r = replay(log);
    print_world(r.world);
    std::cout << '\n' << format_metrics_table(r.metrics);
    if (!log.summary) {
        std::cout << "log is truncated (no run_end record); metrics cover the recorded prefix\n";
        return kOk;
    }
    if (!r.matches_stored) {
        std::cerr << "recomputed metrics differ from the stored report\n";
        return kMismatch;
    }
    std::cout << "stored metrics reproduced\n";
    return kOk;
}

int cmd_metrics(const std::string& path, std::optional<double> threshold) {
    const EventLog log = read_log(path);
    const double d_c = threshold.value_or(log.header.config.collision_threshold);
    const MetricsReport m = compute_metrics(log.events, d_c);
    std::cout << format_metrics_table(m);
    if (!log.summary) std::cout << "(truncated log)\n";
    std::ofstream(path + ".metrics.json") << json(m).dump(2) << '\n';
    return kOk;
}

int cmd_validate(const std::string& scenario, const std::string& config) {
    load_scenario(scenario);
    if (!config.empty()) load_config(config);
    std::cout << scenario << ": ok\n";
    return kOk;
}

int cmd_serve(const std::string& listen, const std::string& scenario, const std::string& config, double realtime) {
    ui::ServerOptions opt;
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos) throw ValidationError("listen", "expected <host>:<port>");
    opt.address = listen.substr(0, colon);
    opt.port = static_cast<unsigned short>(std::stoi(listen.substr(colon + 1)));
    opt.realtime_factor = realtime;
    ui::Server server(scenario_or_default(scenario), config_or_default(config), opt);
    std::signal(SIGINT, [](int) { std::_Exit(0); });
    std::cout << "listening on ws://" << opt.address << ':' << server.port() << ui::kSessionPath << std::endl;
    server.run();
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hrcsim: human-robot collaborative tabletop simulator"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "run a simulation and write its event log");
    run_cmd->add_option("--scenario", run_args.scenario, "scenario JSON (default: built-in nine-block task)");
    run_cmd->add_option("--config", run_args.config, "simulation config JSON");
    run_cmd->add_option("--human", run_args.human, "idle | scripted:<file> | playback:<file>");
    run_cmd->add_option("--out", run_args.out, "log path (default: $HRCSIM_LOG_DIR/run-<seed>.jsonl)");
    run_cmd->add_option("--seed", run_args.seed, "overrides config and HRCSIM_SEED");

    std::string log_path;
    std::string tick_range;
    auto* replay_cmd = app.add_subcommand("replay", "rebuild the world from a log and check its metrics");
    replay_cmd->add_option("log", log_path)->required();
    replay_cmd->add_option("--tick-range", tick_range, "<from>:<to>, print those records and the world at <to>");

    std::optional<double> threshold;
    auto* metrics_cmd = app.add_subcommand("metrics", "compute fluency metrics from a log");
    metrics_cmd->add_option("log", log_path)->required();
    metrics_cmd->add_option("--threshold", threshold, "collision distance in m (default: from the log)");

    std::string scenario_path;
    std::string config_path;
    auto* validate_cmd = app.add_subcommand("validate", "check a scenario (and optionally a config)");
    validate_cmd->add_option("scenario", scenario_path)->required();
    validate_cmd->add_option("--config", config_path);

    std::string listen = "127.0.0.1:8765";
    double realtime = 1.0;
    auto* serve_cmd = app.add_subcommand("serve", "serve an interactive session over WebSocket");
    serve_cmd->add_option("--listen", listen, "<host>:<port>");
    serve_cmd->add_option("--scenario", scenario_path);
    serve_cmd->add_option("--config", config_path);
    serve_cmd->add_option("--realtime", realtime, "simulated seconds per wall second, 0 = unpaced");

    std::string export_path;
    auto* export_cmd = app.add_subcommand("export-scenario", "write the built-in scenario as JSON");
    export_cmd->add_option("out", export_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return cmd_run(run_args);
        if (*replay_cmd) return cmd_replay(log_path, tick_range);
        if (*metrics_cmd) return cmd_metrics(log_path, threshold);
        if (*validate_cmd) return cmd_validate(scenario_path, config_path);
        if (*serve_cmd) return cmd_serve(listen, scenario_path, config_path, realtime);
        if (*export_cmd) {
            write_scenario(nine_block_mirror(), export_path);
            return kOk;
        }
    } catch (const ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kInvalid;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kInvalid;
    } catch (const VersionMismatch& e) {
        std::cerr << "version mismatch: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kOk;
}
