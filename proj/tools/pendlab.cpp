// pendlab: headless runs, parameter sweeps and the live control server.

#include <csignal>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <system_error>

#include "CLI11.hpp"
#include "pendlab/csv.hpp"
#include "pendlab/errors.hpp"
#include "pendlab/protocol.hpp"
#include "pendlab/report.hpp"
#include "pendlab/session.hpp"
#include "pendlab/tcp_server.hpp"

namespace fs = std::filesystem;
using namespace pendlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm local{};
    localtime_r(&now, &local);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &local);
    return buf;
}

std::vector<Setting> parse_overrides(const std::vector<std::string>& overrides) {
    std::vector<Setting> settings;
    for (const auto& text : overrides) {
        const auto eq = text.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + text + "'");
        settings.emplace_back(text.substr(0, eq), text.substr(eq + 1));
    }
    return settings;
}

ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    if (!fs::is_regular_file(path)) throw UsageError("scenario file '" + path + "' not found");
    ScenarioConfig config = load_scenario_file(path);
    apply_settings(config, parse_overrides(overrides));
    config.validate();
    return config;
}

fs::path output_dir(const std::string& requested) {
    fs::path dir = requested.empty() ? fs::path("sessions") / timestamp() : fs::path(requested);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
}

struct RunOptions {
    std::string scenario;
    std::vector<std::string> overrides;
    std::string out;
    std::string inputs;
};

int cmd_run(const RunOptions& opts) {
    const ScenarioConfig config = load_config(opts.scenario, opts.overrides);
    InputLog inputs;
    if (!opts.inputs.empty()) {
        std::ifstream in(opts.inputs);
        if (!in) throw UsageError("input log '" + opts.inputs + "' not found");
        inputs = read_input_log(in);
    }
    const SessionRecord record = run_headless(config, inputs);
    const fs::path dir = output_dir(opts.out);
    write_file(dir / "session.csv", to_csv(record));
    const std::string summary = summarize(record);
    write_file(dir / "summary.txt", summary);
    std::cout << summary << "written: " << (dir / "session.csv").string() << "\n";
    return record.outcome == Outcome::Completed ? kExitOk : kExitFailed;
}

struct SweepOptions {
    std::string scenario;
    std::string param;
    std::vector<std::string> values;
    std::vector<std::string> overrides;
    std::string out;
};

int cmd_sweep(const SweepOptions& opts) {
    if (!is_numeric_key(opts.param))
        throw UsageError("--param must name a numeric scenario key; '" + opts.param + "' is not one");
    const ScenarioConfig base = load_config(opts.scenario, opts.overrides);

    std::vector<ScenarioConfig> configs;
    for (const auto& value : opts.values) {
        ScenarioConfig config = base;
        apply_setting(config, opts.param, value);
        config.validate();
        configs.push_back(config);
    }

    const fs::path dir = output_dir(opts.out);
    std::vector<SweepRow> rows;
    bool all_completed = true;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const SessionRecord record = run_headless(configs[i]);
        SweepRow row;
        row.value = opts.values[i];
        row.outcome = record.outcome;
        row.metrics = record.metrics;
        row.band_entry = summary_band_entry(record);
        row.csv_name = opts.param + "=" + opts.values[i] + ".csv";
        write_file(dir / row.csv_name, to_csv(record));
        all_completed = all_completed && record.outcome == Outcome::Completed;
        rows.push_back(std::move(row));
    }
    const std::string table = sweep_table(opts.param, rows);
    write_file(dir / "sweep.txt", table);
    std::cout << table << "written: " << dir.string() << "\n";
    return all_completed ? kExitOk : kExitFailed;
}

struct ServeOptions {
    std::optional<int> port;
    std::string bind = "127.0.0.1";
    std::optional<double> dt;
    std::string scenario;
    std::vector<std::string> overrides;
    std::string out;
    bool autostart = false;
};

int cmd_serve(const ServeOptions& opts) {
    ScenarioConfig base;
    base.reference = JoystickSource{};
    base.duration.reset();
    if (!opts.scenario.empty()) base = load_config(opts.scenario, {});
    apply_settings(base, parse_overrides(opts.overrides));
    if (opts.dt) base.dt = *opts.dt;
    base.pacing = Pacing::RealTime;
    base.validate();

    // Block the stop signals before any thread starts so sigwait sees them.
    // A shell may have started us with SIGINT ignored; undo that first.
    std::signal(SIGINT, SIG_DFL);
    std::signal(SIGTERM, SIG_DFL);
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    ServerOptions options;
    options.base = base;
    if (!opts.out.empty()) options.record_dir = opts.out;
    ControlServer server(options);

    const std::uint16_t port = opts.port ? static_cast<std::uint16_t>(*opts.port) : port_from_environment();
    std::unique_ptr<TcpServer> tcp;
    try {
        tcp = std::make_unique<TcpServer>(server, port, opts.bind);
    } catch (const std::system_error& e) {
        std::cerr << "error: cannot listen on " << opts.bind << ":" << port << ": " << e.code().message() << "\n";
        return kExitFailed;
    }
    tcp->start();
    std::cout << "pendlab serving on " << tcp->address() << ":" << tcp->port() << std::endl;
    if (opts.autostart) std::cout << encode(server.handle(StartSession{})) << std::endl;

    int received = 0;
    sigwait(&signals, &received);
    std::cout << "shutting down" << std::endl;
    server.shutdown();
    tcp->stop();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pendlab: simulated inverted-pendulum control lab"};
    app.require_subcommand(1);

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario headless and write session.csv + summary.txt");
    run_cmd->add_option("scenario", run.scenario, "Scenario file (or a previous session.csv)")->required();
    run_cmd->add_option("--set", run.overrides, "Override a setting, key=value (repeatable, last wins)");
    run_cmd->add_option("--out", run.out, "Output directory (default sessions/<timestamp>)");
    run_cmd->add_option("--inputs", run.inputs, "Input log (JSON lines) to replay at its recorded ticks");

    SweepOptions sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a scenario once per value of a numeric setting");
    sweep_cmd->add_option("scenario", sweep.scenario, "Scenario file")->required();
    sweep_cmd->add_option("--param", sweep.param, "Numeric setting to vary, e.g. params.b")->required();
    sweep_cmd->add_option("--values", sweep.values, "Comma-separated values")->required()->delimiter(',');
    sweep_cmd->add_option("--set", sweep.overrides, "Override a setting, key=value (repeatable)");
    sweep_cmd->add_option("--out", sweep.out, "Output directory (default sessions/<timestamp>)");

    ServeOptions serve;
    auto* serve_cmd = app.add_subcommand("serve", "Run the live control server");
    serve_cmd->add_option("--port", serve.port, "TCP port (default $PENDLAB_PORT or 8700; 0 picks a free port)")
        ->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--bind", serve.bind, "Listen address");
    serve_cmd->add_option("--dt", serve.dt, "Integration step [s]");
    serve_cmd->add_option("--scenario", serve.scenario, "Base scenario for new sessions");
    serve_cmd->add_option("--set", serve.overrides, "Override a base setting, key=value (repeatable)");
    serve_cmd->add_option("--out", serve.out, "Write each finished session's CSV and input log here");
    serve_cmd->add_flag("--autostart", serve.autostart, "Start a session immediately");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*sweep_cmd) return cmd_sweep(sweep);
        if (*serve_cmd) return cmd_serve(serve);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ProtocolError& e) {
        std::cerr << "usage error: input log: " << e.what() << (e.field().empty() ? "" : " (" + e.field() + ")")
                  << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailed;
    }
    return kExitUsage;
}
