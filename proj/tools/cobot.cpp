#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cobot/analytics/tlx.hpp"
#include "cobot/analytics/trials.hpp"
#include "cobot/bus/broker.hpp"
#include "cobot/bus/replay.hpp"
#include "cobot/error.hpp"
#include "cobot/haptics/pattern.hpp"
#include "cobot/harness/config.hpp"
#include "cobot/harness/scenario.hpp"
#include "cobot/harness/serve.hpp"
#include "cobot/harness/verify.hpp"

namespace fs = std::filesystem;
using namespace cobot;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) {
    g_stop = true;
}

struct Globals {
    std::string config;
    std::optional<int> tcp_port;
    std::optional<int> ws_port;
    std::optional<std::uint64_t> seed;
    bool headless = false;
};

harness::SystemConfig load(const Globals& g) {
    auto cfg = g.config.empty() ? harness::default_config() : harness::load_config(g.config);
    if (g.tcp_port) {
        cfg.ports.tcp = *g.tcp_port;
    }
    if (g.ws_port) {
        cfg.ports.ws = *g.ws_port;
    }
    return cfg;
}

/// A path, or a bundled scenario name such as "pour_two_containers".
fs::path resolve_scenario(const std::string& arg) {
    for (fs::path p : {fs::path(arg), fs::path(arg + ".json"), fs::path("scenarios") / (arg + ".json"),
                       fs::path(COBOT_SCENARIO_DIR) / (arg + ".json")}) {
        if (fs::is_regular_file(p)) {
            return p;
        }
    }
    throw Error("E_IO", "scenario not found: " + arg);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out || !(out << text)) {
        throw Error("E_IO", "cannot write " + path);
    }
}

int fail(const std::string& code, const std::string& message) {
    std::cerr << code << "\n" << message << "\n";
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Desk-scale cobot teleoperation simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config, "System config JSON")->check(CLI::ExistingFile);
    app.add_option("--tcp-port", g.tcp_port, "Bus TCP port")->check(CLI::Range(0, 65535));
    app.add_option("--ws-port", g.ws_port, "Bus WebSocket port")->check(CLI::Range(0, 65535));
    app.add_option("--seed", g.seed, "Seed for synthetic hand frames");
    app.add_flag("--headless", g.headless, "Virtual clock, no network");

    auto* serve = app.add_subcommand("serve", "Run the broker and all nodes in real time");
    std::string ui_dir, tlx_csv = "tlx_responses.csv", serve_log;
    std::optional<int> http_port;
    std::optional<double> duration;
    serve->add_option("--ui", ui_dir, "Serve this directory over HTTP");
    serve->add_option("--http-port", http_port, "HTTP port for --ui")->check(CLI::Range(0, 65535));
    serve->add_option("--tlx-csv", tlx_csv, "CSV receiving study/tlx responses");
    serve->add_option("--log", serve_log, "Write the session log here on shutdown");
    serve->add_option("--duration", duration, "Stop after this many seconds");

    auto* run = app.add_subcommand("run", "Run a scenario");
    std::string scenario_arg, run_log, run_report;
    bool live = false;
    run->add_option("scenario", scenario_arg, "Scenario file or bundled name")->required();
    run->add_option("--log", run_log, "Write the session log here");
    run->add_option("--report", run_report, "Write the report JSON here");
    run->add_flag("--live", live, "Wall clock, paced ticks, bus exposed on the ports");

    auto* replay = app.add_subcommand("replay", "Re-publish a session log");
    std::string replay_log;
    std::optional<double> speed;
    bool strict = false;
    replay->add_option("log", replay_log, "Session log")->required();
    replay->add_option("--speed", speed, "Pace by recorded stamps at this speed");
    replay->add_flag("--strict", strict, "Require the log's config digest to match --config");

    auto* verify = app.add_subcommand("verify", "Check seq continuity and replay digest of a log");
    std::string verify_log;
    verify->add_option("log", verify_log, "Session log")->required();

    auto* analyze = app.add_subcommand("analyze", "Study data analysis");
    analyze->require_subcommand(1);
    bool as_json = false;
    auto* trials = analyze->add_subcommand("trials", "Confusion matrix, recognition rate, ANOVA, t-tests");
    std::string trials_csv;
    trials->add_option("csv", trials_csv, "subject,actual,perceived,response_time_s")->required();
    trials->add_flag("--json", as_json, "Print JSON only");
    auto* tlx = analyze->add_subcommand("tlx", "NASA TLX table");
    std::string tlx_path;
    tlx->add_option("csv", tlx_path, "subject,mental,...,frustration")->required();
    tlx->add_flag("--json", as_json, "Print JSON only");

    auto* patterns = app.add_subcommand("patterns", "Tactile pattern set");
    patterns->require_subcommand(1);
    auto* pexport = patterns->add_subcommand("export", "Write the default pattern set as JSON");
    std::string patterns_out;
    bool with_stream = false;
    pexport->add_option("--out", patterns_out, "Output file (stdout when omitted)");
    pexport->add_flag("--servo", with_stream, "Include each pattern's servo stream");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "E_USAGE\n" << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (*serve) {
            auto cfg = load(g);
            if (http_port) {
                cfg.ports.http = *http_port;
            }
            harness::ServeOptions opts;
            if (!ui_dir.empty()) {
                opts.ui_dir = ui_dir;
            }
            opts.tlx_csv = tlx_csv;
            if (!serve_log.empty()) {
                opts.log_path = serve_log;
            }
            opts.duration_s = duration;
            opts.stop = &g_stop;
            opts.on_ready = [](int tcp, int ws, int http) {
                std::cout << "listening tcp=" << tcp << " ws=" << ws;
                if (http > 0) {
                    std::cout << " http=" << http;
                }
                std::cout << std::endl;
            };
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            harness::serve(cfg, opts);
            return 0;
        }
        if (*run) {
            if (live && g.headless) {
                std::cerr << "E_USAGE\n--live and --headless are exclusive\n";
                return 2;
            }
            const auto cfg = load(g);
            const auto scenario = harness::load_scenario(resolve_scenario(scenario_arg));
            harness::RunOptions opts;
            opts.mode = live ? harness::RunMode::Live : harness::RunMode::Headless;
            opts.seed = g.seed;
            const auto result = harness::run_scenario(scenario, cfg, opts);
            if (!run_log.empty()) {
                bus::write_log(run_log, result.log);
            }
            const auto report = harness::to_json(result.report).dump(2);
            if (!run_report.empty()) {
                write_text(run_report, report + "\n");
            }
            std::cout << report << "\n";
            if (result.report.failed_assertion) {
                return fail("E_ASSERTION", "assertion failed at t=" + std::to_string(result.report.failed_at_s) +
                                               " s: " + *result.report.failed_assertion);
            }
            return 0;
        }
        if (*replay) {
            const auto log = bus::read_log(replay_log);
            const auto cfg = load(g);
            bus::Broker broker({bus::ClockMode::Virtual, log.header.config_digest, true});
            broker.advance_to(log.header.start_stamp_us);
            const auto n = bus::replay_into(log, broker, {speed, strict, harness::config_digest(cfg)});
            const auto digest = bus::log_digest(broker.log().messages);
            const bool match = digest == bus::log_digest(log.messages);
            std::cout << nlohmann::json{{"messages", n}, {"digest", digest}, {"matches_log", match}}.dump(2) << "\n";
            return match ? 0 : fail("E_DIGEST_MISMATCH", "replayed digest differs from the recorded log");
        }
        if (*verify) {
            const auto report = harness::verify_log(bus::read_log(verify_log));
            std::cout << harness::to_json(report).dump(2) << "\n";
            return report.consistent() ? 0 : fail("E_DIGEST_MISMATCH", "replay digest differs from the log digest");
        }
        if (*trials) {
            const auto report = analytics::analyze_trials(analytics::read_trials_csv(trials_csv));
            if (!as_json) {
                std::cout << analytics::format_report(report);
            }
            std::cout << analytics::to_json(report).dump(as_json ? 2 : -1) << "\n";
            return 0;
        }
        if (*tlx) {
            const auto table = analytics::aggregate_tlx(analytics::read_tlx_csv(tlx_path));
            if (!as_json) {
                std::cout << analytics::format_table(table);
            }
            std::cout << analytics::to_json(table).dump(as_json ? 2 : -1) << "\n";
            return 0;
        }
        if (*pexport) {
            const auto cfg = load(g);
            auto out = nlohmann::json::array();
            for (const auto& p : haptics::default_pattern_set(cfg.pattern_duration_s)) {
                auto j = haptics::to_json(p);
                if (with_stream) {
                    auto stream = nlohmann::json::array();
                    for (const auto& s : haptics::servo_stream(cfg.thumb, cfg.index, p, cfg.stream_rate_hz)) {
                        stream.push_back(haptics::to_json(s));
                    }
                    j["servo_stream"] = std::move(stream);
                }
                out.push_back(std::move(j));
            }
            if (patterns_out.empty()) {
                std::cout << out.dump(2) << "\n";
            } else {
                write_text(patterns_out, out.dump(2) + "\n");
            }
            return 0;
        }
    } catch (const Error& e) {
        return fail(e.code(), e.what());
    } catch (const std::exception& e) {
        return fail("E_INTERNAL", e.what());
    }
    return 2;
}
